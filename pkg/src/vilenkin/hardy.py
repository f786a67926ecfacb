"""Martingale Hardy-space machinery at finite resolution.

A grid function generates the martingale of its conditional expectations
(rank-n coset averages, equal to the partial sums at the full-rank
indices).  The maximal function, the L_p and weak-L_p quasinorms, atom
certificates, and the atomic upper bound live here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .radix import Coset, RadixSystem, coset_indices
from .transform import GridFunction, character_on_grid

__all__ = [
    "MartingaleView",
    "AtomCertificate",
    "AtomValidationError",
    "conditional_expectation",
    "maximal_function",
    "lp_norm",
    "weak_lp_norm",
    "hardy_quasinorm",
    "verify_atom",
    "assemble_atomic_martingale",
    "atomic_upper_bound",
    "martingale_coefficient",
]

ATOM_TOL = 1e-10


def conditional_expectation(f: GridFunction, n: int) -> GridFunction:
    """Average of f over each rank-n coset, broadcast back to the grid."""
    system = f.system
    if not 0 <= n <= system.depth:
        raise ValueError(f"rank must be in [0, {system.depth}]")
    if n == system.depth:
        return f.copy()
    arr = f.values.reshape(tuple(reversed(system.radices)))
    mean = arr.mean(axis=tuple(range(system.depth - n)), keepdims=True)
    out = np.broadcast_to(mean, arr.shape).reshape(system.size).copy()
    return GridFunction(system, out)


@dataclass
class MartingaleView:
    """The level sequence (E_n f : 0 <= n <= A) of a grid function.

    Levels are computed once at construction and shared read-only.
    """

    base: GridFunction
    levels: tuple[GridFunction, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        depth = self.base.system.depth
        self.levels = tuple(
            conditional_expectation(self.base, n) for n in range(depth + 1)
        )

    @property
    def system(self) -> RadixSystem:
        return self.base.system

    @classmethod
    def from_function(cls, f: GridFunction) -> "MartingaleView":
        return cls(base=f)


def maximal_function(mv: MartingaleView) -> GridFunction:
    """Pointwise maximum of |E_n f| over all levels."""
    stack = np.abs(np.stack([lvl.values for lvl in mv.levels]))
    return GridFunction(mv.system, stack.max(axis=0))


def lp_norm(f: GridFunction, p: float) -> float:
    """((1/M_A) sum |f|^p)^{1/p} (a quasinorm for p < 1)."""
    if p <= 0:
        raise ValueError("p must be positive")
    return float(np.mean(np.abs(f.values) ** p) ** (1.0 / p))


def weak_lp_norm(f: GridFunction, p: float) -> float:
    """sup over lambda of lambda * mu(|f| > lambda)^{1/p}, computed exactly.

    For a grid function the distribution function is a step function, so
    the supremum is attained just below one of the jumps: sort moduli in
    decreasing order and take the best of v_(i) * ((i+1)/M_A)^{1/p}.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    desc = np.sort(np.abs(f.values))[::-1]
    n = desc.size
    ranks = (np.arange(1, n + 1) / n) ** (1.0 / p)
    return float(np.max(desc * ranks))


def hardy_quasinorm(mv: MartingaleView, p: float) -> float:
    """L_p norm of the maximal function."""
    return lp_norm(maximal_function(mv), p)


@dataclass
class AtomCertificate:
    """Result of checking the three atom conditions on a candidate.

    ``slack`` holds numeric margins: the absolute mean over the interval,
    the gap sup_bound - sup_norm, and the largest leak outside the
    support interval.  Valid means all three flags hold within tolerance.
    """

    interval: Coset
    p: float
    mean_zero: bool
    sup_bounded: bool
    supported: bool
    slack: dict[str, float]
    candidate: GridFunction | None = field(default=None, repr=False)

    @property
    def valid(self) -> bool:
        return self.mean_zero and self.sup_bounded and self.supported

    def to_dict(self) -> dict:
        return {
            "interval_rank": self.interval.rank,
            "interval_anchor": list(self.interval.anchor.coords),
            "p": self.p,
            "mean_zero": self.mean_zero,
            "sup_bounded": self.sup_bounded,
            "supported": self.supported,
            "valid": self.valid,
            "slack": self.slack,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class AtomValidationError(ValueError):
    """Raised when a candidate fails the atom conditions."""

    def __init__(self, certificate: AtomCertificate):
        self.certificate = certificate
        super().__init__(f"invalid atom: {certificate.to_dict()}")


def verify_atom(a: GridFunction, interval: Coset, p: float) -> AtomCertificate:
    """Check mean zero on the interval, the sup bound mu(I)^{-1/p}, and
    support containment, with relative tolerance 1e-10."""
    if not 0 < p <= 1:
        raise ValueError("atoms are defined for 0 < p <= 1")
    system = a.system
    idx = coset_indices(interval, system)
    inside = np.zeros(system.size, dtype=bool)
    inside[idx] = True

    mean_abs = abs(a.values[inside].sum()) / system.size
    sup_norm = float(np.max(np.abs(a.values)))
    measure = len(idx) / system.size
    sup_bound = measure ** (-1.0 / p)
    leak = float(np.max(np.abs(a.values[~inside]))) if (~inside).any() else 0.0

    scale = max(1.0, sup_norm)
    cert = AtomCertificate(
        interval=interval,
        p=p,
        mean_zero=mean_abs <= ATOM_TOL * scale,
        sup_bounded=sup_norm <= sup_bound * (1.0 + ATOM_TOL),
        supported=leak <= ATOM_TOL * scale,
        slack={
            "mean_abs": float(mean_abs),
            "sup_margin": float(sup_bound - sup_norm),
            "support_leak": leak,
        },
        candidate=a,
    )
    return cert


def assemble_atomic_martingale(
    atoms: list[tuple[float, GridFunction, Coset]],
    p: float,
    system: RadixSystem | None = None,
) -> MartingaleView:
    """Sum weight_k * a_k and wrap it as a martingale, validating each atom.

    An empty list yields the zero martingale (``system`` required then).
    """
    if not atoms:
        if system is None:
            raise ValueError("empty atom list needs an explicit system")
        return MartingaleView.from_function(
            GridFunction(system, np.zeros(system.size, dtype=np.complex128))
        )
    system = atoms[0][1].system
    total = np.zeros(system.size, dtype=np.complex128)
    for weight, a, interval in atoms:
        cert = verify_atom(a, interval, p)
        if not cert.valid:
            raise AtomValidationError(cert)
        total += weight * a.values
    return MartingaleView.from_function(GridFunction(system, total))


def atomic_upper_bound(
    atoms: list[tuple[float, GridFunction, Coset]], p: float
) -> float:
    """(sum |weight_k|^p)^{1/p} after validating every atom.

    The martingale assembled from the same list (see
    :func:`assemble_atomic_martingale`) is expected to satisfy
    hardy_quasinorm <= C * bound for a moderate constant C; the harness
    reports the empirical ratio.
    """
    if not 0 < p <= 1:
        raise ValueError("atomic decompositions are defined for 0 < p <= 1")
    if not atoms:
        return 0.0
    for weight, a, interval in atoms:
        cert = verify_atom(a, interval, p)
        if not cert.valid:
            raise AtomValidationError(cert)
    return float(sum(abs(w) ** p for w, _, _ in atoms) ** (1.0 / p))


def martingale_coefficient(mv: MartingaleView, i: int) -> complex:
    """Coefficient of the martingale at index i.

    Evaluated as the inner product of the first level that already
    resolves index i (any deeper level gives the same value; tests pin
    the stability).
    """
    system = mv.system
    if not 0 <= i < system.size:
        raise ValueError(f"index must be in [0, {system.size})")
    n = 0
    while system.cumulative[n] <= i:
        n += 1
    level = mv.levels[n]
    return complex(np.vdot(character_on_grid(system, i), level.values) / system.size)
