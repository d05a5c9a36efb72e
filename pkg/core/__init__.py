# Core module for qflift
from .catalog import Catalog, SpaceBasis, load_catalog
from .checks import CheckRecord, CheckStatus, VerifyReport
from .corollaries import Evaluator, registry, verify_corollary
from .lincomb import ComboResult, ComboStatus, solve_in_basis
from .qseries import QSeries, eisenstein, eta_quotient, theta
from .repcount import DivisorSumFormula, count_brute, count_series, eval_formula
from .runner import Bounds, VerifyManager
from .shimura import LiftClaim, LiftParams, QuadForm, lift, lift_theta
