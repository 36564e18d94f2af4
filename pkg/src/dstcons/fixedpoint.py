"""Fixed points of the self-combination map and their numerical stability.

A mass function ``m`` is a fixed point of an operator when ``m (+) m = m``.
Stability is judged from the Jacobian of the self-combination image with
respect to the free coordinates (all subsets except the universal set, whose
mass is the dependent coordinate ``1 - sum``), evaluated by central finite
differences: a fixed point is stable when every eigenvalue lies strictly
inside the unit circle.

The image map is polynomial (rational for Dempster's rule) in the subset
coordinates, so the differencing evaluates it coordinate-wise; at simplex
boundary points the perturbed evaluations use that polynomial extension and
the report flags them.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, log

import numpy as np

from .mass import (
    MassFunction,
    TotalConflictError,
    get_combiner,
)

EPS_FIX = 1e-10
DELTA_STAB = 1e-3
DEFAULT_STEP = 1e-6

# Simplex-membership slack when validating polynomial-map inputs.
_SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class FixedPointReport:
    """Residual, spectral radius, and the resulting classification for one point."""

    operator: str
    mass: MassFunction
    residual: float
    is_fixed: bool
    spectral_radius: float
    classification: str  # stable | unstable | marginal | not_fixed
    boundary: bool  # differencing left the simplex (polynomial extension used)


def self_combine_residual(operator: str, m: MassFunction) -> float:
    """Max-norm distance between ``m (+) m`` and ``m`` over all subsets."""
    combined = get_combiner(operator)(m, m)
    residual = 0.0
    for subset in m.focal.keys() | combined.focal.keys():
        diff = abs(combined.focal.get(subset, 0.0) - m.focal.get(subset, 0.0))
        if diff > residual:
            residual = diff
    return residual


def dp_polynomial_map(x: np.ndarray) -> np.ndarray:
    """Dubois & Prade self-combination images for n = 3, written out explicitly.

    ``x`` holds the six free masses in the order {s1}, {s2}, {s3}, {s1,s2},
    {s1,s3}, {s2,s3}; the universal-set mass is the dependent coordinate
    ``x7 = 1 - sum(x)``.  Returns the images of the same six subsets.  This is
    the hand-expanded counterpart of the generic operator, kept as an anchor
    for the finite-difference machinery.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (6,):
        raise ValueError(f"expected 6 free coordinates, got shape {x.shape}")
    if np.any(x < -_SIMPLEX_TOL) or float(x.sum()) > 1.0 + _SIMPLEX_TOL:
        raise ValueError("point lies outside the mass simplex")
    x1, x2, x3, x4, x5, x6 = x
    x7 = 1.0 - float(x.sum())
    return np.array(
        [
            x1 * x1 + 2 * x1 * x4 + 2 * x1 * x5 + 2 * x1 * x7 + 2 * x4 * x5,
            x2 * x2 + 2 * x2 * x4 + 2 * x2 * x6 + 2 * x2 * x7 + 2 * x4 * x6,
            x3 * x3 + 2 * x3 * x5 + 2 * x3 * x6 + 2 * x3 * x7 + 2 * x5 * x6,
            x4 * x4 + 2 * x1 * x2 + 2 * x4 * x7,
            x5 * x5 + 2 * x1 * x3 + 2 * x5 * x7,
            x6 * x6 + 2 * x2 * x3 + 2 * x6 * x7,
        ]
    )


def _self_image(operator: str, coords: np.ndarray, n: int) -> np.ndarray:
    """Self-combination image over all subsets, as a function of raw coordinates.

    ``coords[a]`` is the mass on subset ``a`` (index 0 unused).  The formulas
    are evaluated directly, so coordinates outside the simplex are permitted;
    this is the polynomial (rational, for Dempster) extension of the
    operators used by the finite-difference Jacobian.
    """
    full = (1 << n) - 1
    if operator == "average":
        return coords.copy()
    image = np.zeros(full + 1)
    k = 0.0
    dubois = operator == "dubois_prade"
    for a in range(1, full + 1):
        va = coords[a]
        if va == 0.0:
            continue
        for b in range(1, full + 1):
            vb = coords[b]
            if vb == 0.0:
                continue
            c = a & b
            p = va * vb
            if c:
                image[c] += p
            elif dubois:
                image[a | b] += p
            else:
                k += p
    if operator == "dempster":
        if abs(1.0 - k) <= EPS_FIX:
            raise TotalConflictError(f"self-combination fully conflicts (K={k!r})")
        image /= 1.0 - k
    elif operator == "yager":
        image[full] += k
    return image


def _free_coords(m: MassFunction) -> np.ndarray:
    full = m.frame.full_set
    coords = np.zeros(full + 1)
    for subset, value in m.focal.items():
        coords[subset] = value
    return coords[1:full]


def _image_of_free(operator: str, free: np.ndarray, n: int) -> np.ndarray:
    full = (1 << n) - 1
    coords = np.zeros(full + 1)
    coords[1:full] = free
    coords[full] = 1.0 - float(free.sum())
    return _self_image(operator, coords, n)[1:full]


def perturbations_leave_simplex(m: MassFunction, h: float = DEFAULT_STEP) -> bool:
    """True when some +-h coordinate perturbation exits the mass simplex."""
    free = _free_coords(m)
    full_mass = 1.0 - float(free.sum())
    return bool(np.any(free < h)) or full_mass < h


def numeric_jacobian(
    operator: str, m: MassFunction, h: float = DEFAULT_STEP
) -> np.ndarray:
    """Central-difference Jacobian of the self-combination map at ``m``.

    Free coordinates are the subsets in ascending index order with the
    universal set eliminated; a perturbation of coordinate ``j`` is absorbed
    by the universal-set mass.  Size is ``(2^n - 2) x (2^n - 2)``.
    """
    if h <= 0.0:
        raise ValueError(f"step must be positive, got {h}")
    n = m.frame.n
    x0 = _free_coords(m)
    d = x0.size
    jac = np.empty((d, d))
    for j in range(d):
        plus = x0.copy()
        plus[j] += h
        minus = x0.copy()
        minus[j] -= h
        jac[:, j] = (
            _image_of_free(operator, plus, n) - _image_of_free(operator, minus, n)
        ) / (2.0 * h)
    return jac


def spectral_radius_eig(jac: np.ndarray) -> float:
    """Largest eigenvalue magnitude via full eigendecomposition."""
    return float(np.max(np.abs(np.linalg.eigvals(jac))))


def spectral_radius_power(jac: np.ndarray, max_squarings: int = 64) -> float:
    """Largest eigenvalue magnitude via normalized repeated squaring.

    Tracks ``||J^(2^i)||`` in log space; the Gelfand limit ``||J^m||^(1/m)``
    converges to the spectral radius for any matrix, including defective and
    complex-spectrum cases that defeat single-vector power iteration.
    """
    b = np.asarray(jac, dtype=float)
    norm = float(np.linalg.norm(b))
    if norm == 0.0:
        return 0.0
    b = b / norm
    log_scale = log(norm)
    power = 1
    estimate = exp(log_scale / power)
    for _ in range(max_squarings):
        b = b @ b
        norm = float(np.linalg.norm(b))
        if norm == 0.0:
            return 0.0
        b = b / norm
        log_scale = 2.0 * log_scale + log(norm)
        power *= 2
        previous, estimate = estimate, exp(log_scale / power)
        if abs(estimate - previous) <= 1e-13 * max(1.0, estimate):
            break
    return estimate


def classify(
    operator: str,
    m: MassFunction,
    *,
    eps_fix: float = EPS_FIX,
    delta_stab: float = DELTA_STAB,
    h: float = DEFAULT_STEP,
) -> FixedPointReport:
    """Build the full report: residual, spectral radius, stability class."""
    try:
        residual = self_combine_residual(operator, m)
    except TotalConflictError:
        return FixedPointReport(
            operator=operator,
            mass=m,
            residual=float("inf"),
            is_fixed=False,
            spectral_radius=float("inf"),
            classification="not_fixed",
            boundary=False,
        )
    jac = numeric_jacobian(operator, m, h)
    rho = spectral_radius_eig(jac)
    is_fixed = residual <= eps_fix
    if not is_fixed:
        classification = "not_fixed"
    elif rho < 1.0 - delta_stab:
        classification = "stable"
    elif rho > 1.0 + delta_stab:
        classification = "unstable"
    else:
        classification = "marginal"
    return FixedPointReport(
        operator=operator,
        mass=m,
        residual=residual,
        is_fixed=is_fixed,
        spectral_radius=rho,
        classification=classification,
        boundary=perturbations_leave_simplex(m, h),
    )
