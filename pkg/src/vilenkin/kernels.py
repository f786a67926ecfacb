"""Dirichlet kernels, partial sums, and the closed-form kernel identities.

D_n is the sum of the first n characters (D_0 := 0, matching S_0 f := 0).
At the full-rank indices the kernel collapses to a scaled coset
indicator, D_{M_n} = M_n * 1_{I_n}, and every D_n factorizes over digit
positions; both identities are exposed here so they can be checked
against direct summation.
"""

from __future__ import annotations

import numpy as np

from .radix import RadixError, RadixSystem, VIndex, decompose
from .transform import (
    GridFunction,
    Spectrum,
    character_on_grid,
    fast_transform,
    inverse_transform,
    rademacher_on_grid,
)

__all__ = [
    "dirichlet_kernel",
    "dirichlet_closed_form_Mn",
    "dirichlet_factorization",
    "kernel_shift_identity_check",
    "partial_sum",
]


def _as_int(n: int | VIndex) -> int:
    return n.value if isinstance(n, VIndex) else int(n)


def dirichlet_kernel(system: RadixSystem, n: int | VIndex) -> GridFunction:
    """D_n, computed as the inverse transform of a truncated flat spectrum."""
    n = _as_int(n)
    if not 0 <= n <= system.size:
        raise RadixError(f"kernel index must be in [0, {system.size}]")
    mask = np.zeros(system.size, dtype=np.complex128)
    mask[:n] = 1.0
    return inverse_transform(Spectrum(system, mask))


def dirichlet_closed_form_Mn(system: RadixSystem, n: int) -> GridFunction:
    """M_n * 1_{I_n}: the closed form of D_{M_n}."""
    if not 0 <= n <= system.depth:
        raise RadixError(f"rank must be in [0, {system.depth}]")
    m_n = system.cumulative[n]
    values = np.zeros(system.size, dtype=np.complex128)
    values[::m_n] = m_n  # I_n holds exactly the indices divisible by M_n
    return GridFunction(system, values)


def dirichlet_factorization(system: RadixSystem, n: int | VIndex) -> GridFunction:
    """D_n assembled from the digit-wise factorization.

    Evaluates psi_n * sum_j D_{M_j} * sum_{u=m_j-n_j}^{m_j-1} r_j^u with
    the inner sum empty at positions where the digit n_j vanishes; only
    positions up to the order of n contribute.
    """
    idx = n if isinstance(n, VIndex) else decompose(n, system)
    if idx.value < 1:
        raise RadixError("factorization is defined for n >= 1")
    total = np.zeros(system.size, dtype=np.complex128)
    for j, d in enumerate(idx.digits):
        if d == 0:
            continue
        m_j = system.radices[j]
        r_j = rademacher_on_grid(system, j)
        inner = np.zeros(system.size, dtype=np.complex128)
        for u in range(m_j - d, m_j):
            inner += r_j**u
        total += dirichlet_closed_form_Mn(system, j).values * inner
    return GridFunction(system, character_on_grid(system, idx) * total)


def kernel_shift_identity_check(
    system: RadixSystem, j: int | VIndex, k: int, tol: float = 1e-10
) -> bool:
    """Whether D_{j + M_k} = D_{M_k} + psi_{M_k} * D_j holds pointwise.

    Requires j < M_k (so the digit expansions of j and M_k do not
    interact) and j + M_k <= M_A.
    """
    j = _as_int(j)
    if not 0 <= k < system.depth:
        raise RadixError(f"rank must be in [0, {system.depth})")
    m_k = system.cumulative[k]
    if not 0 <= j < m_k:
        raise RadixError(f"shift identity requires 0 <= j < M_k = {m_k}")
    if j + m_k > system.size:
        raise RadixError("j + M_k exceeds the grid size")
    lhs = dirichlet_kernel(system, j + m_k).values
    rhs = (
        dirichlet_closed_form_Mn(system, k).values
        + character_on_grid(system, m_k) * dirichlet_kernel(system, j).values
    )
    return bool(np.max(np.abs(lhs - rhs)) <= tol)


def partial_sum(f: GridFunction, n: int) -> GridFunction:
    """S_n f via spectrum truncation and the inverse transform."""
    n = _as_int(n)
    if not 0 <= n <= f.system.size:
        raise RadixError(f"partial-sum order must be in [0, {f.system.size}]")
    spec = fast_transform(f)
    spec.coeffs[n:] = 0.0
    return inverse_transform(spec)
