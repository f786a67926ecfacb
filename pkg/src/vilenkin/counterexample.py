"""Divergence construction for unbounded coefficient weights.

Given a nondecreasing unbounded weight sequence, a block plan selects
ranks alpha_1 < alpha_2 < ... (all >= 2) at which the weight has at
least doubled, guaranteeing a geometric bound on the tail
sum_k w_k^{-p/4}.  Each block contributes one kernel-difference atom

    a_k = (M_{alpha_k}^{1/p-1} / M) * (D_{M_{alpha_k + 1}} - D_{M_{alpha_k}})

weighted by lambda_k = Phi_{M_{alpha_k}}^{-1/4}.  The resulting
martingale has piecewise-constant coefficients (one value per block),
its partial sums are flat off the rank-1 coset at the distinguished
indices, and the three weighted series grow along the blocks at least
like the envelopes Phi^{1/2}, Phi^{1/2}, Phi^{3/4}.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import accel
from .hardy import MartingaleView
from .radix import RadixError, RadixSystem, VIndex, decompose, is_n0_member
from .transform import GridFunction

__all__ = [
    "WeightSequence",
    "BlockPlan",
    "BlockRow",
    "DivergenceReport",
    "WeightError",
    "ResolutionError",
    "select_alphas",
    "build_atom",
    "build_martingale",
    "closed_form_coefficients",
    "closed_form_spectrum",
    "partial_sum_closed_form",
    "divergence_sums",
]


class WeightError(ValueError):
    """Weight sequence violates its contract (nondecreasing, unbounded)."""


class ResolutionError(ValueError):
    """The working depth is too small to fit even one block."""


@dataclass(frozen=True)
class WeightSequence:
    """A nondecreasing weight n -> Phi_n >= 0, unbounded in the limit.

    ``evaluator`` must accept numpy integer arrays and return float
    arrays.  ``kind`` is a display tag used in reports.
    """

    kind: str
    evaluator: Callable[[np.ndarray], np.ndarray]

    def __call__(self, n) -> np.ndarray | float:
        arr = np.asarray(n)
        out = np.asarray(self.evaluator(arr), dtype=float)
        return float(out) if np.isscalar(n) or arr.ndim == 0 else out

    @classmethod
    def log(cls) -> "WeightSequence":
        return cls("log", lambda n: np.log2(1.0 + n))

    @classmethod
    def loglog(cls) -> "WeightSequence":
        return cls("loglog", lambda n: np.log2(1.0 + np.log2(1.0 + n)))

    @classmethod
    def power(cls, beta: float) -> "WeightSequence":
        if beta <= 0:
            raise WeightError("power exponent must be positive")
        return cls(f"pow:{beta:g}", lambda n: np.asarray(n, dtype=float) ** beta)

    @classmethod
    def from_table(cls, ns, values, kind: str = "table") -> "WeightSequence":
        ns = np.asarray(ns, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        if ns.size == 0 or ns.size != values.size:
            raise WeightError("table must give matching, non-empty columns")
        if np.any(np.diff(ns) <= 0):
            raise WeightError("table indices must be strictly increasing")
        if np.any(np.diff(values) < 0):
            raise WeightError("table values must be nondecreasing")

        def evaluate(n):
            pos = np.clip(np.searchsorted(ns, n, side="right") - 1, 0, ns.size - 1)
            return values[pos]

        return cls(kind, evaluate)

    @classmethod
    def from_csv(cls, path) -> "WeightSequence":
        ns, values = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or not row[0].strip():
                    continue
                try:
                    n = int(float(row[0]))
                except ValueError:
                    continue  # header line
                ns.append(n)
                values.append(float(row[1]))
        return cls.from_table(ns, values, kind=f"file:{path}")

    @classmethod
    def parse(cls, spec: str) -> "WeightSequence":
        """Parse a CLI weight spec: log | loglog | pow:BETA | file:PATH."""
        if spec == "log":
            return cls.log()
        if spec == "loglog":
            return cls.loglog()
        if spec.startswith("pow:"):
            return cls.power(float(spec.split(":", 1)[1]))
        if spec.startswith("file:"):
            return cls.from_csv(spec.split(":", 1)[1])
        raise WeightError(f"unknown weight spec {spec!r}")


@dataclass(frozen=True)
class BlockPlan:
    """Selected block ranks with their weights.

    ``phi_values[k]`` is Phi_{M_{alpha_k}}, ``lambdas[k]`` its -1/4
    power, and ``tail_bound`` the realized sum of Phi^{-p/4}, which the
    doubling selection keeps under a geometric envelope.
    """

    alphas: tuple[int, ...]
    p: float
    phi_values: tuple[float, ...]
    lambdas: tuple[float, ...]
    tail_bound: float
    weight: WeightSequence = field(repr=False)
    system: RadixSystem = field(repr=False)

    @property
    def blocks(self) -> int:
        return len(self.alphas)

    def block_coefficient(self, k: int) -> float:
        """The constant coefficient value on block k (0-based)."""
        m_a = self.system.cumulative[self.alphas[k]]
        return (m_a ** (1.0 / self.p - 1.0) / self.system.bound) / self.phi_values[
            k
        ] ** 0.25

    def block_of_index(self, j: int) -> int | None:
        """Block number containing coefficient index j, or None."""
        for k, a in enumerate(self.alphas):
            if self.system.cumulative[a] <= j < self.system.cumulative[a + 1]:
                return k
        return None


def select_alphas(
    phi: WeightSequence, p: float, resolution: int, system: RadixSystem
) -> BlockPlan:
    """Greedy block selection with a doubling threshold.

    alpha_1 is the first rank >= 2 where the weight is positive;
    each later rank is the first one where the weight has at least
    doubled since the previous selection.  Doubling makes the tail
    sum of Phi^{-p/4} geometric, which is what the construction needs
    from the selection.  Raises :class:`ResolutionError` when no block
    fits below the working depth.
    """
    if not 0 < p <= 2:
        raise ValueError("p must be in (0, 2]")
    if resolution != system.depth:
        system = system.truncated(resolution) if resolution < system.depth else system
    if system.depth != resolution:
        raise RadixError("resolution exceeds the radix system depth")
    if resolution < 3:
        raise ResolutionError(
            f"resolution {resolution} cannot fit a block; need at least 3"
        )

    ranks = np.arange(2, resolution, dtype=np.int64)  # candidate alphas, alpha+1 <= A
    phis = phi(np.asarray([system.cumulative[a] for a in ranks]))
    lo = float(phi(system.cumulative[2]))
    hi = float(phi(system.cumulative[resolution - 1]))
    if not hi > lo:
        raise WeightError(
            f"weight {phi.kind!r} is not unbounded on the representable range "
            f"(Phi stays at {lo:g} up to rank {resolution - 1})"
        )

    alphas: list[int] = []
    values: list[float] = []
    for a, v in zip(ranks, phis):
        if not alphas:
            if v > 0:
                alphas.append(int(a))
                values.append(float(v))
        elif v >= 2.0 * values[-1]:
            alphas.append(int(a))
            values.append(float(v))
    if not alphas:
        raise ResolutionError(
            "no rank below the working depth carries positive weight; "
            "increase the resolution"
        )

    lambdas = tuple(v**-0.25 for v in values)
    tail = float(sum(v ** (-p / 4.0) for v in values))
    return BlockPlan(
        alphas=tuple(alphas),
        p=p,
        phi_values=tuple(values),
        lambdas=lambdas,
        tail_bound=tail,
        weight=phi,
        system=system,
    )


def _kernel_difference(system: RadixSystem, rank: int) -> np.ndarray:
    """D_{M_{rank+1}} - D_{M_rank} from the closed forms, as raw values."""
    out = np.zeros(system.size)
    m_lo, m_hi = system.cumulative[rank], system.cumulative[rank + 1]
    out[::m_lo] -= m_lo
    out[::m_hi] += m_hi
    return out


def build_atom(block: int, plan: BlockPlan, system: RadixSystem | None = None) -> GridFunction:
    """The kernel-difference atom of one block (0-based index)."""
    system = system or plan.system
    a = plan.alphas[block]
    if a + 1 > system.depth:
        raise RadixError(f"block rank {a} does not fit below depth {system.depth}")
    m_a = system.cumulative[a]
    scale = m_a ** (1.0 / plan.p - 1.0) / system.bound
    return GridFunction(system, scale * _kernel_difference(system, a))


def build_martingale(plan: BlockPlan, system: RadixSystem | None = None) -> MartingaleView:
    """sum_k lambda_k a_k wrapped with its conditional-expectation levels."""
    system = system or plan.system
    total = np.zeros(system.size, dtype=np.complex128)
    for k in range(plan.blocks):
        total += plan.lambdas[k] * build_atom(k, plan, system).values
    return MartingaleView.from_function(GridFunction(system, total))


def closed_form_coefficients(plan: BlockPlan, j: int) -> complex:
    """Coefficient value at index j: the block constant inside a block, 0 off."""
    if not 0 <= j < plan.system.size:
        raise ValueError(f"index must be in [0, {plan.system.size})")
    k = plan.block_of_index(j)
    return complex(plan.block_coefficient(k)) if k is not None else 0j


def closed_form_spectrum(plan: BlockPlan) -> np.ndarray:
    """All M_A coefficient values at once."""
    out = np.zeros(plan.system.size, dtype=np.complex128)
    for k, a in enumerate(plan.alphas):
        lo, hi = plan.system.cumulative[a], plan.system.cumulative[a + 1]
        out[lo:hi] = plan.block_coefficient(k)
    return out


def partial_sum_closed_form(plan: BlockPlan, j: int | VIndex) -> float:
    """Predicted constant value of |S_j f| off the rank-1 coset.

    Only defined for indices inside a block whose lowest digit and top
    nonzero digit both equal 1 (the partial sum is flat there because
    the finished blocks vanish off I_1 and the running block reduces to
    a single character of unit modulus).
    """
    idx = j if isinstance(j, VIndex) else decompose(j, plan.system)
    if idx.value < 1 or not is_n0_member(idx):
        raise ValueError(
            f"index {idx.value} lacks the digit pattern (lowest and top digits 1)"
        )
    k = plan.block_of_index(idx.value)
    if k is None:
        raise ValueError(f"index {idx.value} lies outside every block")
    return plan.block_coefficient(k)


@dataclass
class BlockRow:
    """Per-block partial sums of the three weighted series with envelopes."""

    k: int
    alpha_k: int
    m_alpha_k: int
    phi: float
    sum2a: float
    sum2b: float | None
    sum2c: float | None
    env_half: float
    env_34: float

    @property
    def ratio2a(self) -> float:
        return self.sum2a / self.env_half

    @property
    def ratio2b(self) -> float | None:
        return None if self.sum2b is None else self.sum2b / self.env_half

    @property
    def ratio2c(self) -> float | None:
        return None if self.sum2c is None else self.sum2c / self.env_34


_CSV_COLUMNS = [
    "k",
    "alpha_k",
    "M_alpha_k",
    "phi",
    "sum2a",
    "sum2b",
    "sum2c",
    "env_half",
    "env_34",
    "ratio2a",
    "ratio2b",
    "ratio2c",
]


@dataclass
class DivergenceReport:
    """Rows of partial sums per block, plus plan metadata and notices."""

    rows: list[BlockRow]
    plan_info: dict
    notices: list[str]
    extras: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_COLUMNS)
            for r in self.rows:
                writer.writerow(
                    [
                        r.k,
                        r.alpha_k,
                        r.m_alpha_k,
                        repr(r.phi),
                        repr(r.sum2a),
                        "" if r.sum2b is None else repr(r.sum2b),
                        "" if r.sum2c is None else repr(r.sum2c),
                        repr(r.env_half),
                        repr(r.env_34),
                        repr(r.ratio2a),
                        "" if r.ratio2b is None else repr(r.ratio2b),
                        "" if r.ratio2c is None else repr(r.ratio2c),
                    ]
                )

    def to_dict(self) -> dict:
        return {
            "plan": self.plan_info,
            "notices": self.notices,
            "rows": [
                {
                    "k": r.k,
                    "alpha_k": r.alpha_k,
                    "M_alpha_k": r.m_alpha_k,
                    "phi": r.phi,
                    "sum2a": r.sum2a,
                    "sum2b": r.sum2b,
                    "sum2c": r.sum2c,
                    "env_half": r.env_half,
                    "env_34": r.env_34,
                    "ratio2a": r.ratio2a,
                    "ratio2b": r.ratio2b,
                    "ratio2c": r.ratio2c,
                }
                for r in self.rows
            ],
            **self.extras,
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            with open(path, "w", encoding="ascii") as fh:
                fh.write(text + "\n")
        return text


def _weight_over_range(phi: WeightSequence, lo: int, hi: int, p: float) -> float:
    """sum of Phi_j / j^{2-p} over lo <= j < hi."""
    if hi <= lo:
        return 0.0
    j = np.arange(lo, hi, dtype=np.int64)
    return float(np.sum(phi(j) / j.astype(float) ** (2.0 - p)))


def _reduced_partial(plan: BlockPlan, upto: int, depth: int) -> np.ndarray:
    """sum_{k < upto} lambda_k a_k restricted to the depth-``depth`` grid."""
    sub = plan.system.truncated(depth)
    total = np.zeros(sub.size, dtype=np.complex128)
    for k in range(upto):
        a = plan.alphas[k]
        m_a = plan.system.cumulative[a]
        scale = plan.lambdas[k] * (m_a ** (1.0 / plan.p - 1.0) / plan.system.bound)
        total += scale * _kernel_difference(sub, a)
    return total


def _weak_norm_values(values: np.ndarray, p: float) -> float:
    desc = np.sort(np.abs(values))[::-1]
    n = desc.size
    ranks = (np.arange(1, n + 1) / n) ** (1.0 / p)
    return float(np.max(desc * ranks))


def divergence_sums(plan: BlockPlan, upto_block: int | None = None) -> DivergenceReport:
    """Partial sums of the three weighted series, one row per block.

    Row k accumulates every series over indices up to M_{alpha_k + 1}-1.
    The coefficient series uses the closed-form spectrum (verified
    against the transform elsewhere); the partial-sum series walks S_j f
    incrementally on the coarsest grid that resolves the running block.
    Columns whose exponent range excludes the plan's p are omitted with
    a notice.
    """
    p = plan.p
    system = plan.system
    phi = plan.weight
    blocks = plan.blocks if upto_block is None else min(upto_block, plan.blocks)
    if blocks < 1:
        raise ValueError("at least one block is required")

    notices = []
    do_2b = 0 < p <= 1
    do_2c = 0 < p < 1
    if not do_2b:
        notices.append("sum2b omitted: defined for 0 < p <= 1")
    if not do_2c:
        notices.append("sum2c omitted: defined for 0 < p < 1")

    rows: list[BlockRow] = []
    cum_a = 0.0
    cum_b = 0.0
    cum_b_alt = 0.0
    cum_c = 0.0
    prev_end = 1  # next series index not yet accumulated into sum2c
    for k in range(blocks):
        a = plan.alphas[k]
        start, end = system.cumulative[a], system.cumulative[a + 1]
        coeff = plan.block_coefficient(k)
        phi_k = plan.phi_values[k]

        # (2a): only in-block indices contribute
        cum_a += coeff**p * _weight_over_range(phi, start, end, p)

        # (2b): the lacunary sub-series, nonzero exactly at the block ranks
        if do_2b:
            m_rank = system.radices[a]
            m_a = float(system.cumulative[a])
            term = phi_k * (m_rank - 1) * coeff**2
            cum_b += m_a ** (2.0 - 2.0 / p) * term
            cum_b_alt += term / m_a ** (2.0 / p - 2.0)

        # (2c): weak quasinorms of every partial sum up to the block end
        if do_2c:
            depth = a + 1
            sub = system.truncated(depth)
            if prev_end < start:
                flat = _reduced_partial(plan, k, depth)
                w = _weak_norm_values(flat, p)
                cum_c += w**p * _weight_over_range(phi, prev_end, start, p)
            state = _reduced_partial(plan, k, depth)
            coeffs_seg = np.full(end - start, coeff, dtype=np.complex128)
            weak = accel.scan_weak_norms(state, coeffs_seg, start, sub.radices, p)
            j = np.arange(start, end, dtype=np.int64)
            cum_c += float(np.sum(weak**p * phi(j) / j.astype(float) ** (2.0 - p)))
            prev_end = end

        rows.append(
            BlockRow(
                k=k + 1,
                alpha_k=a,
                m_alpha_k=system.cumulative[a],
                phi=phi_k,
                sum2a=cum_a,
                sum2b=cum_b if do_2b else None,
                sum2c=cum_c if do_2c else None,
                env_half=math.sqrt(phi_k),
                env_34=phi_k**0.75,
            )
        )

    plan_info = {
        "radices": list(system.radices),
        "resolution": system.depth,
        "p": p,
        "weight": phi.kind,
        "alphas": list(plan.alphas),
        "lambdas": list(plan.lambdas),
        "phi_values": list(plan.phi_values),
        "tail_bound": plan.tail_bound,
    }
    extras = {"sum2b_alt_normalization": cum_b_alt if do_2b else None}
    return DivergenceReport(rows=rows, plan_info=plan_info, notices=notices, extras=extras)
