"""Analytic functions on a disk slightly larger than the unit disk.

A function is either a finite power series or a closed-form catalog entry.
Both expose exact derivatives of any order, so f, f', f'' and f(z)/z are
never obtained by finite differences.

    >>> f = preset("koebe")
    >>> eval_jet(f, 0.5).d1
    (12+0j)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, RepresentationError, SingularityError, ValidationError

CLASS_A = "classA"
UNIT_CONSTANT = "unitConstantTerm"
GENERAL = "general"
CLASS_TAGS = (CLASS_A, UNIT_CONSTANT, GENERAL)

TAIL_TOL = 1e-15
TAIL_RADIUS = 1.05
MAX_TERMS = 256
COEFF_TOL = 1e-14
SINGULAR_TOL = 1e-14


@dataclass(frozen=True)
class Jet2:
    """Value with exact first and second derivatives."""

    value: complex | np.ndarray
    d1: complex | np.ndarray
    d2: complex | np.ndarray


@dataclass(frozen=True, eq=False)
class AnalyticFunction:
    kind: str
    class_tag: str
    radius: float
    coefficients: tuple[complex, ...] = ()
    catalog_id: str | None = None
    catalog_params: tuple = ()
    parent: AnalyticFunction | None = None
    label: str = field(default="", compare=False)

    @cached_property
    def _coeff_array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=complex)

    def derivatives(self, z: np.ndarray, order: int) -> list[np.ndarray]:
        """[f, f', ..., f^(order)] at ``z`` (no domain check)."""
        if self.kind == "series":
            return _series_derivs(self._coeff_array, z, order)
        return _CATALOG[self.catalog_id].derivs(self, z, order)

    def ratio_derivatives(self, z: np.ndarray, order: int) -> list[np.ndarray]:
        """Derivatives of f(z)/z; only defined for class-A functions."""
        if self.class_tag != CLASS_A:
            raise ValidationError(f"{self.label}: f(z)/z requires class_tag {CLASS_A}")
        if self.kind == "series":
            return _series_derivs(self._coeff_array[1:], z, order)
        ratio = _CATALOG[self.catalog_id].ratio
        if ratio is None:
            raise ValidationError(f"{self.label}: no closed form for f(z)/z")
        return ratio(self, z, order)

    def __call__(self, z):
        return evaluate(self, z)

    def __repr__(self) -> str:
        return f"AnalyticFunction({self.label}, {self.class_tag}, R={self.radius:g})"


# -- array helpers -----------------------------------------------------------

def _prep(z) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _out(arr: np.ndarray, scalar: bool):
    return complex(arr) if scalar else arr


def _check_domain(f: AnalyticFunction, z: np.ndarray) -> None:
    if not math.isfinite(f.radius):
        return
    bad = np.abs(z) >= f.radius
    if np.any(bad):
        witness = complex(z.reshape(-1)[np.flatnonzero(bad.reshape(-1))[0]])
        raise DomainError(f"{f.label}: |z| = {abs(witness):.17g} >= R = {f.radius:.17g} at z = {witness}")


def _series_derivs(coeffs: np.ndarray, z: np.ndarray, order: int) -> list[np.ndarray]:
    out = []
    c = coeffs
    for _ in range(order + 1):
        if c.size == 0:
            out.append(np.zeros_like(z, dtype=complex))
        else:
            out.append(np.polynomial.polynomial.polyval(z, c))
        c = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(0, dtype=complex)
    return out


# -- closed forms ------------------------------------------------------------
# Each entry returns [h, h', ..., h^(order)] for the function and, for class-A
# entries, for f(z)/z.

@dataclass(frozen=True)
class _CatalogEntry:
    derivs: Callable
    ratio: Callable | None
    coeffs: Callable


def _koebe(f, z, order):
    w = 1.0 - z
    return [math.factorial(k) * (k + z) / w ** (k + 2) for k in range(order + 1)]


def _koebe_ratio(f, z, order):
    w = 1.0 - z
    return [math.factorial(k + 1) / w ** (k + 2) for k in range(order + 1)]


def _koebe_coeffs(f, n):
    return [complex(k) for k in range(n + 1)]


def _zexp(f, z, order):
    (c,) = f.catalog_params
    e = np.exp(c * z)
    out = [z * e]
    for k in range(1, order + 1):
        out.append(e * (k * c ** (k - 1) + c**k * z))
    return out


def _zexp_ratio(f, z, order):
    (c,) = f.catalog_params
    e = np.exp(c * z)
    return [c**k * e for k in range(order + 1)]


def _zexp_coeffs(f, n):
    (c,) = f.catalog_params
    out, term = [0j], 1 + 0j
    for k in range(1, n + 1):
        out.append(term)
        term *= c / k
    return out


def _zinv(f, z, order):
    (c,) = f.catalog_params
    w = 1.0 - c * z
    out = [z / w]
    for k in range(1, order + 1):
        out.append(math.factorial(k) * c ** (k - 1) / w ** (k + 1))
    return out


def _zinv_ratio(f, z, order):
    (c,) = f.catalog_params
    w = 1.0 - c * z
    return [math.factorial(k) * c**k / w ** (k + 1) for k in range(order + 1)]


def _zinv_coeffs(f, n):
    (c,) = f.catalog_params
    return [0j] + [c ** (k - 1) for k in range(1, n + 1)]


def _deriv_of(f, z, order):
    return f.parent.derivatives(z, order + 1)[1:]


def _deriv_coeffs(f, n):
    c = _catalog_coefficients(f.parent, n + 1)
    return [k * c[k] for k in range(1, len(c))]


def _over_z(f, z, order):
    return f.parent.ratio_derivatives(z, order)


def _over_z_coeffs(f, n):
    return _catalog_coefficients(f.parent, n + 1)[1:]


_CATALOG = {
    "koebe": _CatalogEntry(_koebe, _koebe_ratio, _koebe_coeffs),
    "z_exp_cz": _CatalogEntry(_zexp, _zexp_ratio, _zexp_coeffs),
    "z_over_one_minus_cz": _CatalogEntry(_zinv, _zinv_ratio, _zinv_coeffs),
    "derivative_of": _CatalogEntry(_deriv_of, None, _deriv_coeffs),
    "over_z": _CatalogEntry(_over_z, None, _over_z_coeffs),
}

PRESET_NAMES = (
    "identity",
    "koebe",
    "polynomial",
    "z_exp_cz",
    "z_over_one_minus_cz",
    "constant_one",
    "derivative_of",
    "over_z",
)


def _catalog_coefficients(f: AnalyticFunction, n: int) -> list[complex]:
    if f.kind == "series":
        c = list(f.coefficients) + [0j] * max(0, n + 1 - len(f.coefficients))
        return c[: n + 1]
    return _CATALOG[f.catalog_id].coeffs(f, n)


# -- public operations -------------------------------------------------------

def evaluate(f: AnalyticFunction, z):
    """f(z) only."""
    arr, scalar = _prep(z)
    _check_domain(f, arr)
    return _out(f.derivatives(arr, 0)[0], scalar)


def eval_jet(f: AnalyticFunction, z) -> Jet2:
    arr, scalar = _prep(z)
    _check_domain(f, arr)
    v, d1, d2 = f.derivatives(arr, 2)
    return Jet2(_out(v, scalar), _out(d1, scalar), _out(d2, scalar))


def ratio_over_z(f: AnalyticFunction, z):
    """f(z)/z with the removable singularity at the origin filled in.

    Raises SingularityError where the quotient vanishes, since every caller
    divides by it.
    """
    arr, scalar = _prep(z)
    _check_domain(f, arr)
    q = f.ratio_derivatives(arr, 0)[0]
    bad = np.abs(q) < SINGULAR_TOL
    if np.any(bad):
        witness = complex(arr.reshape(-1)[np.flatnonzero(bad.reshape(-1))[0]])
        raise SingularityError(f"{f.label}: f(z)/z vanishes at z = {witness}", witness=witness)
    return _out(q, scalar)


def _validate_tag(coeffs: Sequence[complex], class_tag: str) -> None:
    if class_tag not in CLASS_TAGS:
        raise ValidationError(f"unknown class_tag {class_tag!r}")
    c0 = coeffs[0]
    c1 = coeffs[1] if len(coeffs) > 1 else 0j
    problems = []
    if class_tag == CLASS_A:
        if abs(c0) > COEFF_TOL:
            problems.append(f"classA requires c0 = 0 (c0 != 0: got {c0})")
        if abs(c1 - 1) > COEFF_TOL:
            problems.append(f"classA requires c1 = 1 (got {c1})")
    elif class_tag == UNIT_CONSTANT and abs(c0 - 1) > COEFF_TOL:
        problems.append(f"unitConstantTerm requires c0 = 1 (got {c0})")
    if problems:
        raise ValidationError("; ".join(problems))


def infer_class_tag(coeffs: Sequence[complex]) -> str:
    c0 = complex(coeffs[0])
    c1 = complex(coeffs[1]) if len(coeffs) > 1 else 0j
    if abs(c0) <= COEFF_TOL and abs(c1 - 1) <= COEFF_TOL:
        return CLASS_A
    if abs(c0 - 1) <= COEFF_TOL:
        return UNIT_CONSTANT
    return GENERAL


def from_coefficients(
    coeffs: Sequence[complex],
    class_tag: str | None = None,
    *,
    truncated: bool = False,
    label: str | None = None,
) -> AnalyticFunction:
    """Build a series function from Taylor coefficients c0, c1, ..., cN.

    An exact list is a polynomial and is valid on the whole plane. With
    ``truncated=True`` the list is a truncation of an infinite series: the
    last term must satisfy |cN| 1.05^N < 1e-15, and R is the radius at which
    that term reaches the tail tolerance.
    """
    c = [complex(x) for x in coeffs]
    if not c:
        raise ValidationError("coefficient list is empty")
    if not all(math.isfinite(x.real) and math.isfinite(x.imag) for x in c):
        raise ValidationError("coefficients must be finite")
    if class_tag is None:
        class_tag = infer_class_tag(c)
    _validate_tag(c, class_tag)
    if class_tag == CLASS_A:
        c[0], c[1] = 0j, 1 + 0j
    elif class_tag == UNIT_CONSTANT:
        c[0] = 1 + 0j
    radius = math.inf
    if truncated:
        n = len(c) - 1
        while n > 0 and c[n] == 0:
            n -= 1
        if n > 0:
            tail = abs(c[n]) * TAIL_RADIUS**n
            if tail >= TAIL_TOL:
                raise RepresentationError(
                    f"tail bound violated: |c_{n}| * {TAIL_RADIUS}^{n} = {tail:.3e} >= {TAIL_TOL:g}"
                )
            radius = (TAIL_TOL / abs(c[n])) ** (1.0 / n)
    if label is None:
        label = "series[" + ",".join(_fmt_complex(x) for x in c[:6]) + (",...]" if len(c) > 6 else "]")
    return AnalyticFunction("series", class_tag, radius, coefficients=tuple(c), label=label)


def coefficients(f: AnalyticFunction) -> list[complex]:
    """Taylor coefficients, truncated where |c_N| 1.05^N < 1e-15 or N = 256."""
    if f.kind == "series":
        return list(f.coefficients)
    c = _catalog_coefficients(f, MAX_TERMS)
    for n in range(2, len(c)):
        if abs(c[n]) * TAIL_RADIUS**n < TAIL_TOL:
            return c[: n + 1]
    return c


def derivative(f: AnalyticFunction) -> AnalyticFunction:
    """f' as an AnalyticFunction; class-A input gives a unit-constant-term g."""
    tag = UNIT_CONSTANT if f.class_tag == CLASS_A else GENERAL
    label = f"d/dz {f.label}"
    if f.kind == "series":
        d = np.polynomial.polynomial.polyder(f._coeff_array) if len(f.coefficients) > 1 else np.zeros(1)
        c = [complex(x) for x in d]
        return AnalyticFunction("series", tag, f.radius, coefficients=tuple(c), label=label)
    return AnalyticFunction("catalog", tag, f.radius, catalog_id="derivative_of", parent=f, label=label)


def divided_by_z(f: AnalyticFunction) -> AnalyticFunction:
    """f(z)/z for class-A f."""
    if f.class_tag != CLASS_A:
        raise ValidationError(f"{f.label}: f(z)/z requires class_tag {CLASS_A}")
    label = f"({f.label})/z"
    if f.kind == "series":
        return AnalyticFunction("series", UNIT_CONSTANT, f.radius, coefficients=f.coefficients[1:], label=label)
    return AnalyticFunction("catalog", UNIT_CONSTANT, f.radius, catalog_id="over_z", parent=f, label=label)


def preset(name: str, *params) -> AnalyticFunction:
    """Catalog constructor.

    ``polynomial`` takes the coefficients, ``z_exp_cz`` and
    ``z_over_one_minus_cz`` take c, ``derivative_of`` and ``over_z`` take a
    class-A AnalyticFunction.
    """
    if name == "identity":
        return from_coefficients([0, 1], CLASS_A, label="identity")
    if name == "constant_one":
        return from_coefficients([1], UNIT_CONSTANT, label="constant_one")
    if name == "koebe":
        _nparams(name, params, 0)
        # Singular at z = 1: valid on the open disk only.
        return AnalyticFunction("catalog", CLASS_A, 1.0, catalog_id="koebe", label="koebe")
    if name == "polynomial":
        if not params:
            raise ValidationError("polynomial needs at least one coefficient")
        return from_coefficients(params, label="polynomial[" + ",".join(_fmt_complex(complex(p)) for p in params) + "]")
    if name == "z_exp_cz":
        _nparams(name, params, 1)
        c = complex(params[0])
        return AnalyticFunction(
            "catalog", CLASS_A, math.inf, catalog_id="z_exp_cz", catalog_params=(c,), label=f"z_exp_cz({_fmt_complex(c)})"
        )
    if name == "z_over_one_minus_cz":
        _nparams(name, params, 1)
        c = complex(params[0])
        if abs(c) > 1:
            raise ValidationError(f"z_over_one_minus_cz: |c| = {abs(c):g} > 1 puts the pole inside the unit disk")
        radius = math.inf if c == 0 else 1.0 / abs(c)
        return AnalyticFunction(
            "catalog",
            CLASS_A,
            radius,
            catalog_id="z_over_one_minus_cz",
            catalog_params=(c,),
            label=f"z_over_one_minus_cz({_fmt_complex(c)})",
        )
    if name == "derivative_of":
        _nparams(name, params, 1)
        return derivative(_as_function(params[0]))
    if name == "over_z":
        _nparams(name, params, 1)
        return divided_by_z(_as_function(params[0]))
    raise ValidationError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")


def _nparams(name, params, n):
    if len(params) != n:
        raise ValidationError(f"{name} takes {n} parameter(s), got {len(params)}")


def _as_function(x) -> AnalyticFunction:
    if not isinstance(x, AnalyticFunction):
        raise ValidationError(f"expected an AnalyticFunction, got {type(x).__name__}")
    return x


def _fmt_complex(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:g}"
    return f"{c.real:g}{c.imag:+g}j"
