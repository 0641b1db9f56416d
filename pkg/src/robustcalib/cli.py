"""Command-line entry point.

Subcommands: ``calib`` (calibration curves), ``verdict``, ``train`` (one
trajectory) and ``sweep`` (seed x loss grid). Every option can also come
from a ``key=value`` file passed with ``--config``; flags override it.

Exit codes: 0 success, 1 usage or validation error, 2 runtime failure or
tolerance violation.
"""

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from robustcalib.calibration import (DEFAULT_ALPHA_GRID, DEFAULT_ETA_POINTS, biconjugate,
                                     calibration_fn_numeric, verdict)
from robustcalib.closed_forms import UnsupportedRegimeError, biconjugate_closed, delta_closed
from robustcalib.experiment import (atomic_write_rows, excess_proxies, gen_twonorm, load_csv,
                                    train, write_trajectory)
from robustcalib.losses import Family, LossSpec

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
THREADS_ENV = "ROBUSTCALIB_THREADS"
FAMILIES = [f.value for f in Family]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_loss_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--loss", choices=FAMILIES)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robustcalib", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    calib = sub.add_parser("calib", help="emit a calibration curve as CSV")
    _add_loss_args(calib)
    calib.add_argument("--mode", choices=["numeric", "closed", "both"])
    calib.add_argument("--out", help="output CSV path; stdout when omitted")
    calib.add_argument("--tol", type=float, help="max allowed |numeric - closed| in mode both")
    calib.add_argument("--eps-points", type=int)
    calib.add_argument("--eps-min", type=float)
    calib.add_argument("--eps-max", type=float)
    calib.add_argument("--eta-points", type=int)
    calib.add_argument("--alpha-grid", type=int)

    ver = sub.add_parser("verdict", help="decide calibration of a loss")
    _add_loss_args(ver)

    for name, text in (("train", "run one gradient-descent trajectory"),
                       ("sweep", "run a seed x loss grid")):
        p = sub.add_parser(name, help=text)
        if name == "train":
            _add_loss_args(p)
            p.add_argument("--seed", type=int)
            p.add_argument("--out", help="trajectory CSV path; stdout when omitted")
            p.add_argument("--train-csv", help="training data file instead of twonorm")
            p.add_argument("--test-csv", help="test data file instead of twonorm")
        else:
            p.add_argument("--losses", help="comma-separated loss families")
            p.add_argument("--beta", type=float)
            p.add_argument("--gamma", type=float)
            p.add_argument("--seeds", type=int, help="number of seeds")
            p.add_argument("--seed-offset", type=int)
            p.add_argument("--outdir")
        p.add_argument("--lr", type=float)
        p.add_argument("--steps", type=int)
        p.add_argument("--n-train", type=int)
        p.add_argument("--n-test", type=int)

    for p in sub.choices.values():
        p.add_argument("--config", help="key=value file; flags override it")
    return parser


DEFAULTS = {
    "calib": {"beta": 0.0, "gamma": 0.1, "mode": "numeric", "out": None, "tol": 2e-2,
              "eps_points": 97, "eps_min": 0.02, "eps_max": 0.98,
              "eta_points": DEFAULT_ETA_POINTS, "alpha_grid": DEFAULT_ALPHA_GRID},
    "verdict": {"beta": 0.0, "gamma": 0.1},
    "train": {"beta": 0.2, "gamma": 0.2, "seed": 0, "out": None, "train_csv": None,
              "test_csv": None, "lr": 0.1, "steps": 200, "n_train": 800, "n_test": 200},
    "sweep": {"losses": "ramp,sigmoid,hinge,logistic", "beta": 0.2, "gamma": 0.2, "seeds": 50,
              "seed_offset": 0, "outdir": None, "lr": 0.1, "steps": 200, "n_train": 800,
              "n_test": 200},
}


def read_config(path: str, parser: argparse.ArgumentParser, command: str) -> dict:
    """Parse a flat key=value file into typed option values."""
    sub = parser._subparsers._group_actions[0].choices[command]
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in actions:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r} for {command}")
            action = actions[key]
            try:
                typed = action.type(value) if action.type else value
            except ValueError:
                raise UsageError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
            if action.choices and typed not in action.choices:
                raise UsageError(f"{path}:{lineno}: {key} must be one of {list(action.choices)}")
            out[key] = typed
    return out


def resolve(argv: list[str]) -> tuple[str, dict]:
    """Merge defaults, config file and flags into one option dict."""
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    command = ns.pop("command")
    config = ns.pop("config")
    opts = dict(DEFAULTS[command])
    if config:
        try:
            opts.update(read_config(config, parser, command))
        except OSError as exc:
            raise UsageError(f"cannot read config {config}: {exc}") from None
    opts.update({k: v for k, v in ns.items() if v is not None})
    if command != "sweep" and opts.get("loss") is None:
        raise UsageError(f"{command}: --loss is required")
    _validate(command, opts)
    return command, opts


def _validate(command: str, o: dict) -> None:
    def need(cond: bool, msg: str) -> None:
        if not cond:
            raise UsageError(msg)

    if "gamma" in o:
        need(0.0 < o["gamma"] < 1.0, "gamma must lie in (0, 1)")
    if "beta" in o:
        need(np.isfinite(o["beta"]), "beta must be finite")
    if command == "calib":
        need(o["eps_points"] >= 1, "eps-points must be at least 1")
        need(0.0 < o["eps_min"] <= o["eps_max"] <= 1.0, "need 0 < eps-min <= eps-max <= 1")
        need(o["eps_points"] == 1 or o["eps_min"] < o["eps_max"],
             "eps-min must be below eps-max")
        need(o["eta_points"] >= 2001, "eta-points must be at least 2001")
        need(o["alpha_grid"] >= 2001, "alpha-grid must be at least 2001")
        need(o["tol"] >= 0.0, "tol must be nonnegative")
    if command in ("train", "sweep"):
        need(o["lr"] > 0.0, "lr must be positive")
        need(o["steps"] >= 1, "steps must be at least 1")
        need(o["n_train"] >= 1 and o["n_test"] >= 1, "n-train and n-test must be positive")
    if command == "sweep":
        need(o["seeds"] >= 1, "seeds must be at least 1")
        need(o["outdir"] is not None, "sweep: --outdir is required")
        names = [s.strip() for s in o["losses"].split(",") if s.strip()]
        bad = [s for s in names if s not in FAMILIES]
        need(names and not bad, f"unknown loss families: {bad or o['losses']}")
        o["losses"] = names


def _emit(path, header, rows) -> None:
    if path in (None, "-"):
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format(float(v), ".17g") for v in row])
    else:
        atomic_write_rows(path, header, rows)


def cmd_calib(o: dict) -> int:
    loss = LossSpec(o["loss"], o["beta"])
    eps = np.linspace(o["eps_min"], o["eps_max"], o["eps_points"])
    mode, gamma = o["mode"], o["gamma"]
    cols = [eps]
    header = ["epsilon"]
    if mode in ("closed", "both"):
        try:
            closed = np.array([delta_closed(loss.family, loss.shift, gamma, e)[0] for e in eps])
        except UnsupportedRegimeError as exc:
            print(f"error: unsupported regime: {exc}", file=sys.stderr)
            return EXIT_USAGE
        try:
            closed_bi = np.array([biconjugate_closed(loss.family, loss.shift, gamma, e)
                                  for e in eps])
        except UnsupportedRegimeError as exc:
            print(f"note: {exc}; delta_biconj_closed left as nan", file=sys.stderr)
            closed_bi = np.full(eps.size, np.nan)
    if mode in ("numeric", "both"):
        curve = calibration_fn_numeric(loss, gamma, eps, o["eta_points"], o["alpha_grid"])
        cols += [curve.deltas, biconjugate(curve).deltas]
        header += ["delta", "delta_biconj"]
    if mode == "closed":
        cols += [closed, closed_bi]
        header += ["delta_closed", "delta_biconj_closed"]
    status = EXIT_OK
    if mode == "both":
        diff = np.abs(cols[1] - closed)
        cols += [closed, closed_bi, diff]
        header += ["delta_closed", "delta_biconj_closed", "abs_diff"]
        worst = float(diff.max())
        print(f"max_abs_diff={worst:.6g} tol={o['tol']:.6g}", file=sys.stderr)
        if np.all(np.isfinite(closed_bi)):
            bi_worst = float(np.abs(cols[2] - closed_bi).max())
            print(f"max_abs_diff_biconj={bi_worst:.6g}", file=sys.stderr)
            worst = max(worst, bi_worst)
        if worst > o["tol"]:
            status = EXIT_RUNTIME
    _emit(o["out"], header, np.column_stack(cols))
    return status


def cmd_verdict(o: dict) -> int:
    v = verdict(LossSpec(o["loss"], o["beta"]), o["gamma"])
    line = f"calibrated: {'yes' if v.calibrated else 'no'} {v.rule} witness={v.witness:.6g}"
    if v.zero_one_calibrated:
        line += " zero_one_calibrated=yes"
    print(line)
    return EXIT_OK


def _datasets(o: dict, seed: int):
    if o.get("train_csv") or o.get("test_csv"):
        if not (o.get("train_csv") and o.get("test_csv")):
            raise UsageError("--train-csv and --test-csv must be given together")
        return load_csv(o["train_csv"]), load_csv(o["test_csv"])
    return gen_twonorm(o["n_train"], o["n_test"], seed)


def cmd_train(o: dict) -> int:
    tr, te = _datasets(o, o["seed"])
    traj = train(LossSpec(o["loss"], o["beta"]), tr, o["lr"], o["steps"], o["gamma"], te,
                 o["seed"])
    if o["out"] in (None, "-"):
        _emit(None, ["step", "train_surrogate", "test_surrogate", "test_robust",
                     "test_zero_one"], traj.rows())
    else:
        write_trajectory(traj, o["out"])
    return EXIT_OK


def _sweep_job(job: tuple) -> tuple[str, int, float, float]:
    family, seed, o = job
    tr, te = gen_twonorm(o["n_train"], o["n_test"], seed)
    traj = train(LossSpec(family, o["beta"]), tr, o["lr"], o["steps"], o["gamma"], te, seed)
    write_trajectory(traj, os.path.join(o["outdir"], f"{family}_seed{seed}.csv"))
    sur, tgt = excess_proxies(traj)
    return family, seed, float(sur[-1]), float(tgt[-1])


def sweep_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def cmd_sweep(o: dict) -> int:
    os.makedirs(o["outdir"], exist_ok=True)
    seeds = range(o["seed_offset"], o["seed_offset"] + o["seeds"])
    jobs = [(fam, s, o) for fam in o["losses"] for s in seeds]
    workers = min(sweep_threads(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(j) for j in jobs]
    rows = []
    for fam in o["losses"]:
        sur = np.array([r[2] for r in results if r[0] == fam])
        tgt = np.array([r[3] for r in results if r[0] == fam])
        se = (lambda v: float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0)
        rows.append((fam, sur.size, sur.mean(), se(sur), tgt.mean(), se(tgt)))
    atomic_write_rows(os.path.join(o["outdir"], "summary.csv"),
                      ["loss", "runs", "surrogate_excess_mean", "surrogate_excess_se",
                       "target_excess_mean", "target_excess_se"], rows)
    for row in rows:
        print(f"{row[0]}: target_excess={row[4]:.4g} +- {row[5]:.2g}")
    return EXIT_OK


COMMANDS = {"calib": cmd_calib, "verdict": cmd_verdict, "train": cmd_train, "sweep": cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        command, opts = resolve(argv)
        return COMMANDS[command](opts)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, UnsupportedRegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        where = f" ({exc.filename})" if exc.filename else ""
        print(f"error: {exc.strerror or exc}{where}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
