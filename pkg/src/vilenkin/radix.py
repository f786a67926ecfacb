"""Mixed-radix integer and group-point arithmetic at finite resolution.

A bounded Vilenkin group is described by its generating radix sequence
m_0, m_1, ... (every entry >= 2), truncated here to a working depth A.
Natural numbers below M_A = m_0 * ... * m_{A-1} are identified with digit
tuples through the cumulative products M_0 = 1, M_{k+1} = m_k * M_k, and
grid indices enumerate group points in lexicographic digit order with
coordinate 0 varying fastest.  All types are immutable and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "RadixError",
    "RadixSystem",
    "VIndex",
    "GroupPoint",
    "Coset",
    "decompose",
    "recompose",
    "is_n0_member",
    "count_n0_band",
    "count_n0_band_closed_forms",
    "enumerate_coset_points",
    "coset_indices",
    "point_from_index",
    "index_of_point",
    "digit_matrix",
]


class RadixError(ValueError):
    """Invalid radix sequence, digit expansion, or grid index."""


@dataclass(frozen=True)
class RadixSystem:
    """A radix sequence m_0..m_{A-1} with cumulative products M_0..M_A.

    ``cumulative[k]`` is M_k, so ``cumulative[-1]`` is the grid size M_A.
    ``bound`` is the largest stored radix; for a cyclic specification it
    equals the supremum of the full infinite sequence.
    """

    radices: tuple[int, ...]
    cumulative: tuple[int, ...] = field(init=False, repr=False, compare=False)
    bound: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        radices = tuple(int(m) for m in self.radices)
        if not radices:
            raise RadixError("radix sequence must be non-empty")
        if any(m < 2 for m in radices):
            raise RadixError(f"every radix must be >= 2, got {radices}")
        cum = [1]
        for m in radices:
            cum.append(cum[-1] * m)
        object.__setattr__(self, "radices", radices)
        object.__setattr__(self, "cumulative", tuple(cum))
        object.__setattr__(self, "bound", max(radices))

    @classmethod
    def from_spec(cls, spec: str, resolution: int) -> "RadixSystem":
        """Parse a CLI radix string: ``"2"`` (constant) or ``"2,3,4"`` (cycle).

        The cycle is repeated until ``resolution`` positions are filled.
        """
        try:
            cycle = tuple(int(tok) for tok in spec.split(","))
        except ValueError as exc:
            raise RadixError(f"cannot parse radix spec {spec!r}") from exc
        if resolution < 1:
            raise RadixError("resolution must be >= 1")
        return cls(tuple(cycle[i % len(cycle)] for i in range(resolution)))

    @property
    def depth(self) -> int:
        """Working resolution A."""
        return len(self.radices)

    @property
    def size(self) -> int:
        """Grid size M_A."""
        return self.cumulative[-1]

    def truncated(self, depth: int) -> "RadixSystem":
        """The same system cut to a shallower depth."""
        if not 1 <= depth <= self.depth:
            raise RadixError(f"depth must be in [1, {self.depth}], got {depth}")
        return RadixSystem(self.radices[:depth])


@dataclass(frozen=True)
class VIndex:
    """A natural number below M_A together with its digit expansion.

    ``order`` is the largest position holding a nonzero digit; for the
    value 0 it is the sentinel -1 (strictly below every digit position),
    so that zero never passes predicates that inspect the top digit.
    """

    value: int
    digits: tuple[int, ...]
    order: int


@dataclass(frozen=True)
class GroupPoint:
    """A group element truncated to depth A, one coordinate per position."""

    coords: tuple[int, ...]


@dataclass(frozen=True)
class Coset:
    """The cylinder set of points agreeing with ``anchor`` on the first
    ``rank`` coordinates.  Rank 0 is the whole group; rank A a single
    grid point.  Haar measure is 1/M_rank."""

    rank: int
    anchor: GroupPoint


def decompose(value: int, system: RadixSystem) -> VIndex:
    """Digit expansion of ``value`` in the generalized number system."""
    value = int(value)
    if not 0 <= value < system.size:
        raise RadixError(
            f"value {value} outside [0, {system.size}) for depth {system.depth}"
        )
    digits = []
    v = value
    for m in system.radices:
        digits.append(v % m)
        v //= m
    order = -1
    for j, d in enumerate(digits):
        if d:
            order = j
    return VIndex(value=value, digits=tuple(digits), order=order)


def recompose(digits: tuple[int, ...] | list[int], system: RadixSystem) -> int:
    """Inverse of :func:`decompose`: sum of digits[j] * M_j."""
    if len(digits) != system.depth:
        raise RadixError("digit tuple length must equal the system depth")
    total = 0
    for j, d in enumerate(digits):
        if not 0 <= d < system.radices[j]:
            raise RadixError(f"digit {d} at position {j} exceeds radix")
        total += d * system.cumulative[j]
    return total


def is_n0_member(n: VIndex) -> bool:
    """Whether both the lowest digit and the top nonzero digit equal 1.

    Defined for positive values only; zero is rejected by precondition.
    """
    if n.value < 1:
        raise ValueError("membership is defined for positive integers only")
    return n.digits[0] == 1 and n.digits[n.order] == 1


def count_n0_band(k: int, system: RadixSystem) -> int:
    """Count members of the band M_k <= n <= M_{k+1} by direct enumeration."""
    if not 1 <= k < system.depth:
        raise RadixError(f"band rank must satisfy 1 <= k < {system.depth}")
    lo, hi = system.cumulative[k], system.cumulative[k + 1]
    band = np.arange(lo, hi + 1, dtype=np.int64)
    # digit test per definition: lowest digit 1 and top nonzero digit 1
    rem = band.copy()
    digits = np.empty((k + 2, band.size), dtype=np.int64)
    for t in range(k + 2):
        digits[t] = rem % system.radices[t]
        rem //= system.radices[t]
    top = np.zeros(band.size, dtype=np.int64)
    for t in range(k + 2):
        top[digits[t] != 0] = t
    member = (digits[0] == 1) & (digits[top, np.arange(band.size)] == 1)
    return int(member.sum())


def count_n0_band_closed_forms(k: int, system: RadixSystem) -> dict[str, float]:
    """The two closed-form candidates for the band count.

    ``product_form`` is the product of the radices at positions 1..k-1
    (what enumeration confirms); ``quotient_form`` is M_{k-1}/m_0 (the
    other candidate in circulation).  Both are reported side by side with
    the enumerated count so any discrepancy stays visible.
    """
    if not 1 <= k < system.depth:
        raise RadixError(f"band rank must satisfy 1 <= k < {system.depth}")
    prod = 1
    for j in range(1, k):
        prod *= system.radices[j]
    return {
        "product_form": float(prod),
        "quotient_form": system.cumulative[k - 1] / system.radices[0],
    }


def index_of_point(x: GroupPoint, system: RadixSystem) -> int:
    """Grid index of a point (coordinate 0 varies fastest)."""
    return recompose(x.coords, system)


def point_from_index(i: int, system: RadixSystem) -> GroupPoint:
    """Group point at grid index ``i``."""
    return GroupPoint(coords=decompose(i, system).digits)


def coset_indices(c: Coset, system: RadixSystem) -> np.ndarray:
    """Grid indices of a coset, an arithmetic progression of stride M_rank."""
    if not 0 <= c.rank <= system.depth:
        raise RadixError(f"rank must be in [0, {system.depth}]")
    if len(c.anchor.coords) != system.depth:
        raise RadixError("anchor must carry one coordinate per position")
    stride = system.cumulative[c.rank]
    low = 0
    for j in range(c.rank):
        d = c.anchor.coords[j]
        if not 0 <= d < system.radices[j]:
            raise RadixError(f"anchor coordinate {d} exceeds radix at {j}")
        low += d * system.cumulative[j]
    return low + stride * np.arange(system.size // stride, dtype=np.int64)


def enumerate_coset_points(c: Coset, system: RadixSystem) -> list[GroupPoint]:
    """All M_A / M_rank grid points of a coset, in grid order."""
    return [point_from_index(int(i), system) for i in coset_indices(c, system)]


@lru_cache(maxsize=16)
def _digit_matrix_cached(radices: tuple[int, ...]) -> np.ndarray:
    system = RadixSystem(radices)
    n = np.arange(system.size, dtype=np.int64)
    out = np.empty((system.depth, system.size), dtype=np.int64)
    for t in range(system.depth):
        out[t] = (n // system.cumulative[t]) % radices[t]
    out.setflags(write=False)
    return out


def digit_matrix(system: RadixSystem) -> np.ndarray:
    """Read-only (A, M_A) table; row t holds digit t of every grid index."""
    return _digit_matrix_cached(system.radices)
