"""Numerical checks of univalence criteria on the unit disk, with Loewner-chain
diagnostics, quasiconformal-extension estimates and independent injectivity
oracles."""

__version__ = "0.1.0"

from .criteria import CriterionParams, check, check_criterion, preset_criterion, resolve_preset  # noqa: E402
from .functions import AnalyticFunction, evaluate, from_coefficients, preset  # noqa: E402
from .grid import DiskGrid  # noqa: E402

__all__ = [
    "AnalyticFunction",
    "CriterionParams",
    "DiskGrid",
    "check",
    "check_criterion",
    "evaluate",
    "from_coefficients",
    "preset",
    "preset_criterion",
    "resolve_preset",
]
