"""Mass functions over a finite frame of discernment and their combination rules.

Subsets of the frame are encoded as bitmask integers: bit ``i - 1`` set means
state ``s_i`` belongs to the subset.  Index 0 (the empty set) is never a valid
focal set.  Mass functions are sparse: only strictly positive masses are
stored, and they must total 1 within ``EPS_NORM``.

All values are plain floats and all operations are pure; ``MassFunction``
instances are treated as immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum
from typing import Mapping

import numpy as np

# Normalization tolerance for "sums to one" checks.
EPS_NORM = 1e-9
# Masses below this are treated as rounding dust by renormalize().
EPS_PRUNE = 1e-12


class TotalConflictError(Exception):
    """Dempster's rule is undefined: the two mass functions fully conflict (K = 1)."""


@dataclass(frozen=True)
class FrameOfDiscernment:
    """A frame of ``n`` mutually exclusive states ``s_1 .. s_n``."""

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"frame needs at least 2 states, got n={self.n}")

    @property
    def full_set(self) -> int:
        """Bitmask of the whole frame (the universal set)."""
        return (1 << self.n) - 1

    def singleton(self, i: int) -> int:
        """Bitmask of the single state ``s_i`` (1-based)."""
        if not 1 <= i <= self.n:
            raise ValueError(f"state index {i} outside 1..{self.n}")
        return 1 << (i - 1)

    def members(self, subset: int) -> tuple[int, ...]:
        """1-based state indices contained in ``subset``."""
        self.check_subset(subset)
        return tuple(i + 1 for i in range(self.n) if subset >> i & 1)

    def check_subset(self, subset: int) -> None:
        if not isinstance(subset, int) or not 1 <= subset <= self.full_set:
            raise ValueError(
                f"subset index {subset} invalid for n={self.n}; "
                f"expected 1..{self.full_set} (empty set is not allowed)"
            )

    def subset_label(self, subset: int) -> str:
        """Human-readable label such as ``{s1,s3}``."""
        return "{" + ",".join(f"s{i}" for i in self.members(subset)) + "}"


class MassFunction:
    """A basic probability assignment: positive masses on non-empty subsets.

    ``focal`` maps subset bitmasks to masses.  Construction validates the
    invariants (no empty set, positive entries, total 1 within ``EPS_NORM``).
    """

    __slots__ = ("frame", "focal")

    def __init__(self, frame: FrameOfDiscernment, focal: Mapping[int, float]):
        full = frame.full_set
        total = 0.0
        for subset, value in focal.items():
            if not isinstance(subset, int) or not 1 <= subset <= full:
                raise ValueError(f"invalid focal set index {subset} for n={frame.n}")
            if not value > 0.0:
                raise ValueError(f"mass for subset {subset} must be > 0, got {value}")
            total += value
        if abs(total - 1.0) > EPS_NORM:
            raise ValueError(f"masses must total 1 within {EPS_NORM}, got {total!r}")
        self.frame = frame
        self.focal = dict(focal)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MassFunction):
            return NotImplemented
        return self.frame == other.frame and self.focal == other.focal

    def __repr__(self) -> str:
        return f"MassFunction(n={self.frame.n}, {format_mass(self)})"

    def __str__(self) -> str:
        return format_mass(self)


@dataclass(frozen=True)
class PignisticDistribution:
    """Probability over states obtained by splitting each focal mass equally."""

    frame: FrameOfDiscernment
    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (self.frame.n,):
            raise ValueError(f"expected {self.frame.n} probabilities, got shape {p.shape}")
        if np.any(p < 0.0) or np.any(p > 1.0 + EPS_NORM):
            raise ValueError("pignistic probabilities must lie in [0, 1]")
        if abs(float(p.sum()) - 1.0) > EPS_NORM:
            raise ValueError("pignistic probabilities must total 1")
        object.__setattr__(self, "probs", p)


def format_mass(m: MassFunction) -> str:
    """Debug rendering, e.g. ``{s1,s3}:0.25; {s1,s2,s3}:0.75`` (ascending subsets)."""
    parts = [
        f"{m.frame.subset_label(subset)}:{m.focal[subset]:.6g}"
        for subset in sorted(m.focal)
    ]
    return "; ".join(parts)


def make_vacuous(frame: FrameOfDiscernment) -> MassFunction:
    """The state of complete ignorance: all mass on the universal set."""
    return MassFunction(frame, {frame.full_set: 1.0})


def bel(m: MassFunction, subset: int) -> float:
    """Belief in ``subset``: total mass of focal sets contained in it."""
    m.frame.check_subset(subset)
    return fsum(v for a, v in m.focal.items() if a & subset == a)


def pl(m: MassFunction, subset: int) -> float:
    """Plausibility of ``subset``: total mass of focal sets intersecting it."""
    m.frame.check_subset(subset)
    return fsum(v for a, v in m.focal.items() if a & subset)


def pignistic(m: MassFunction) -> PignisticDistribution:
    """Split every focal set's mass equally among its member states."""
    probs = np.zeros(m.frame.n)
    for subset, value in m.focal.items():
        share = value / subset.bit_count()
        i = 0
        while subset:
            if subset & 1:
                probs[i] += share
            subset >>= 1
            i += 1
    return PignisticDistribution(m.frame, probs)


def conflict(m1: MassFunction, m2: MassFunction) -> float:
    """The conflict K: total product mass landing on disjoint focal pairs."""
    _check_same_frame(m1, m2)
    k = 0.0
    for a, va in m1.focal.items():
        for b, vb in m2.focal.items():
            if not a & b:
                k += va * vb
    return k


def combine_dempster(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Dempster's rule: intersection products rescaled by 1/(1 - K).

    Raises :class:`TotalConflictError` when K = 1 (within ``EPS_NORM``); the
    consensus protocol treats that case as a skipped interaction.
    """
    _check_same_frame(m1, m2)
    raw: dict[int, float] = {}
    k = 0.0
    for a, va in m1.focal.items():
        for b, vb in m2.focal.items():
            c = a & b
            if c:
                raw[c] = raw.get(c, 0.0) + va * vb
            else:
                k += va * vb
    if k >= 1.0 - EPS_NORM:
        raise TotalConflictError(f"total conflict between operands (K={k!r})")
    return _from_products(m1.frame, raw)


def combine_dubois_prade(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Dubois & Prade's rule: disjoint products go to the union instead of being rescaled."""
    _check_same_frame(m1, m2)
    raw: dict[int, float] = {}
    for a, va in m1.focal.items():
        for b, vb in m2.focal.items():
            c = a & b
            if not c:
                c = a | b
            raw[c] = raw.get(c, 0.0) + va * vb
    return _from_products(m1.frame, raw)


def combine_yager(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Yager's rule: all conflicting mass is reallocated to the universal set."""
    _check_same_frame(m1, m2)
    raw: dict[int, float] = {}
    k = 0.0
    for a, va in m1.focal.items():
        for b, vb in m2.focal.items():
            c = a & b
            if c:
                raw[c] = raw.get(c, 0.0) + va * vb
            else:
                k += va * vb
    if k > 0.0:
        full = m1.frame.full_set
        raw[full] = raw.get(full, 0.0) + k
    return _from_products(m1.frame, raw)


def combine_average(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Pointwise arithmetic mean of the two mass functions."""
    _check_same_frame(m1, m2)
    raw: dict[int, float] = {}
    for source in (m1.focal, m2.focal):
        for a, v in source.items():
            raw[a] = raw.get(a, 0.0) + 0.5 * v
    return _from_products(m1.frame, raw)


COMBINERS = {
    "dempster": combine_dempster,
    "dubois_prade": combine_dubois_prade,
    "yager": combine_yager,
    "average": combine_average,
}


def get_combiner(name: str):
    """Look up a combination operator by name; raises on unknown names."""
    try:
        return COMBINERS[name]
    except KeyError:
        raise ValueError(
            f"unknown operator {name!r}; expected one of {sorted(COMBINERS)}"
        ) from None


def renormalize(
    m: MassFunction | Mapping[int, float],
    frame: FrameOfDiscernment | None = None,
) -> MassFunction:
    """Rescale masses to total 1, dropping entries below ``EPS_PRUNE`` first.

    Accepts an existing mass function or a raw ``{subset: mass}`` mapping with
    non-negative entries (``frame`` is required in the latter case).  The total
    must be strictly positive.
    """
    if isinstance(m, MassFunction):
        frame = m.frame
        items = m.focal
    else:
        if frame is None:
            raise ValueError("frame is required when renormalizing a raw mapping")
        items = m
        for subset, value in items.items():
            frame.check_subset(subset)
            if value < 0.0:
                raise ValueError(f"mass for subset {subset} is negative: {value}")
    total = fsum(items.values())
    if total <= 0.0:
        raise ValueError(f"cannot renormalize: total mass {total} is not positive")
    kept = {a: v / total for a, v in items.items() if v / total >= EPS_PRUNE}
    if not kept:
        raise ValueError("all mass entries fell below the pruning threshold")
    kept_total = fsum(kept.values())
    return MassFunction(frame, {a: v / kept_total for a, v in kept.items()})


def approx_eq(m1: MassFunction, m2: MassFunction, eps: float = EPS_NORM) -> bool:
    """Componentwise comparison; subsets absent from one side read as 0."""
    _check_same_frame(m1, m2)
    for subset in m1.focal.keys() | m2.focal.keys():
        if abs(m1.focal.get(subset, 0.0) - m2.focal.get(subset, 0.0)) > eps:
            return False
    return True


def _check_same_frame(m1: MassFunction, m2: MassFunction) -> None:
    if m1.frame != m2.frame:
        raise ValueError(f"frame mismatch: n={m1.frame.n} vs n={m2.frame.n}")


def _from_products(frame: FrameOfDiscernment, raw: dict[int, float]) -> MassFunction:
    # Defensive rescale against rounding drift; exact zeros (underflow) dropped.
    total = fsum(raw.values())
    return MassFunction(frame, {a: v / total for a, v in raw.items() if v > 0.0})
