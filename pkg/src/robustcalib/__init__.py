"""Calibration of surrogate losses wrt the adversarially robust 0-1 loss for linear models."""

from robustcalib.calibration import (CalibrationCurve, CurveKind, ExcessBound, Verdict,
                                     biconjugate, calibration_fn_numeric, delta_bar,
                                     excess_risk_transform, verdict)
from robustcalib.closed_forms import (RegimeTag, UnsupportedRegimeError, biconjugate_closed,
                                      delta_closed)
from robustcalib.experiment import Trajectory, excess_proxies, gen_twonorm, load_csv, train
from robustcalib.kernels import BACKEND
from robustcalib.losses import (Family, LossSpec, RobustTarget, StructuralReport, even_part,
                                one_sided_derivatives, structural_report)
from robustcalib.risk import (CcrQuery, Dataset, LinearModel, ccr, min_ccr, robust_loss_linear,
                              robust_risk, vulnerable_fraction, zero_one_risk)

__version__ = "0.1.0"
