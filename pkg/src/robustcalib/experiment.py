"""Synthetic two-Gaussian experiment: data, gradient descent and risk logs."""

import csv
import math
import os
import tempfile
import warnings
from dataclasses import dataclass

import numpy as np

from robustcalib import kernels
from robustcalib.losses import LossSpec
from robustcalib.risk import (Dataset, LinearModel, robust_risk, surrogate_risk,
                              zero_one_risk)

TRAJECTORY_HEADER = ("step", "train_surrogate", "test_surrogate", "test_robust", "test_zero_one")
TWONORM_MEAN = np.array([2.0, 2.0])


def gen_twonorm(n_train: int, n_test: int, seed: int) -> tuple[Dataset, Dataset]:
    """Two unit-covariance Gaussians at +-(2, 2), rescaled into the unit ball.

    Labels alternate +1, -1 so the classes are balanced. Both splits are
    divided by the largest norm over their union.
    """
    if n_train < 1 or n_test < 1:
        raise ValueError("n_train and n_test must be at least 1")
    rng = np.random.default_rng(seed)
    n = n_train + n_test
    labels = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    features = labels[:, None] * TWONORM_MEAN + rng.standard_normal((n, 2))
    scale = float(np.linalg.norm(features, axis=1).max())
    features /= scale
    train = Dataset(features[:n_train], labels[:n_train], scale)
    test = Dataset(features[n_train:], labels[n_train:], scale)
    return train, test


@dataclass(frozen=True)
class Trajectory:
    """Per-step risks of one gradient-descent run, initial state included."""

    train_surrogate: np.ndarray
    test_surrogate: np.ndarray
    test_robust: np.ndarray
    test_zero_one: np.ndarray
    final_model: LinearModel
    loss: LossSpec
    gamma: float
    lr: float
    steps: int
    seed: int

    def __len__(self) -> int:
        return self.train_surrogate.size

    def rows(self) -> np.ndarray:
        """Records as an array with the trajectory CSV columns."""
        return np.column_stack((np.arange(len(self)), self.train_surrogate, self.test_surrogate,
                                self.test_robust, self.test_zero_one))


def _unit_sphere(dim: int, seed: int) -> np.ndarray:
    v = np.random.default_rng(seed).standard_normal(dim)
    return v / np.linalg.norm(v)


def train(loss: LossSpec, train_data: Dataset, lr: float, steps: int, gamma: float,
          test_data: Dataset, seed: int) -> Trajectory:
    """Full-batch gradient descent with unit-norm renormalisation.

    The parameter vector stacks the weights and the bias. It starts
    uniformly on the unit sphere and is projected back onto it after every
    step. Risks are logged before the first step and after each step.
    """
    if not lr > 0.0:
        raise ValueError("lr must be positive")
    if steps < 1:
        raise ValueError("steps must be at least 1")
    x, y = train_data.features, train_data.labels
    params = _unit_sphere(x.shape[1] + 1, seed)
    logs = np.empty((steps + 1, 4))
    for t in range(steps + 1):
        train_loss, grad = kernels.surrogate_grad(loss.code, loss.shift, x, y, params)
        model = LinearModel(params[:-1].copy(), params[-1])
        logs[t] = (train_loss, surrogate_risk(loss, model, test_data),
                   robust_risk(model, test_data, gamma), zero_one_risk(model, test_data))
        if t == steps:
            break
        params = params - lr * grad
        params = params / np.linalg.norm(params)
    return Trajectory(logs[:, 0], logs[:, 1], logs[:, 2], logs[:, 3], model, loss,
                      float(gamma), float(lr), int(steps), int(seed))


def excess_proxies(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Risks minus their per-trajectory minimum, a proxy for the Bayes risk."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    return (traj.test_surrogate - traj.test_surrogate.min(),
            traj.test_robust - traj.test_robust.min())


def load_csv(path) -> Dataset:
    """Read ``label,feat1,...,featd`` rows into a dataset.

    Blank lines and lines starting with ``#`` are skipped, as is a first
    line whose label field is not numeric. When some row lies outside the
    unit ball every row is divided by the largest norm, a warning is issued
    and the divisor is kept in ``Dataset.scale``.
    """
    labels, rows = [], []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            try:
                values = [float(v) for v in row]
            except ValueError:
                if not labels and lineno == 1:
                    continue
                raise ValueError(f"{path}:{lineno}: non-numeric field") from None
            if len(values) < 2:
                raise ValueError(f"{path}:{lineno}: need a label and at least one feature")
            if values[0] not in (1.0, -1.0):
                raise ValueError(f"{path}:{lineno}: label must be +1 or -1, got {row[0]}")
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ValueError(f"{path}:{lineno}: expected {width} fields, got {len(values)}")
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"{path}:{lineno}: non-finite value")
            labels.append(values[0])
            rows.append(values[1:])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    features = np.array(rows)
    scale = float(np.linalg.norm(features, axis=1).max())
    if scale > 1.0:
        warnings.warn(f"{path}: rows rescaled into the unit ball by {scale:.17g}", stacklevel=2)
        features = features / scale
    else:
        scale = 1.0
    return Dataset(features, np.array(labels), scale)


def atomic_write_rows(path, header, rows) -> None:
    """Write CSV rows with 17 significant digits via a temp file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_trajectory(traj: Trajectory, path) -> None:
    rows = [(int(r[0]), *r[1:]) for r in traj.rows()]
    atomic_write_rows(path, TRAJECTORY_HEADER, rows)


def read_trajectory(path) -> np.ndarray:
    """Load a trajectory CSV written by ``write_trajectory``."""
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
