"""Hot numeric kernels: numba-jitted loops with a pure-numpy fallback.

Two implementations of every kernel live here side by side:

* ``*_numpy``  -- vectorized numpy, always available;
* ``*_numba``  -- explicit @njit loops, used when numba imports cleanly.

The active path is chosen once at import time.  Set the environment
variable ``VILENKIN_NO_NUMBA`` to a value other than ``0`` to force the
numpy path (the benchmark harness calls both paths explicitly).

Kernels
-------
dft_stages(values, radices, inverse)
    In-order mixed-radix transform over all digit positions: stage t
    applies m_t-point DFT blocks along stride M_t.  Forward uses the
    negative-exponent convention and is unnormalized; inverse uses the
    positive exponent and is unnormalized as well.

scan_lp_norms / scan_weak_norms(S, coeffs, k0, radices, p)
    Running partial-sum scan: with S holding S_{k0} on entry, records the
    L_p norm (or weak-L_p quasinorm) of S_k for k = k0 .. k0+len(coeffs)-1
    and applies S += coeffs[i] * psi_{k0+i} after each record.  S is
    mutated in place and holds S_{k0+len(coeffs)} on exit.  The character
    psi_k is maintained incrementally through the digit counter of k.

scan_mask_extrema(S, coeffs, k0, radices, mask)
    Same scan, recording min and max of |S_k| over the masked grid points
    (used for flatness certificates).
"""

from __future__ import annotations

import os

import numpy as np

from ._tables import root_table
from .radix import RadixSystem, digit_matrix

__all__ = [
    "HAVE_NUMBA",
    "USE_NUMBA",
    "backend_name",
    "dft_stages",
    "scan_lp_norms",
    "scan_weak_norms",
    "scan_mask_extrema",
    "dft_stages_numpy",
    "scan_lp_norms_numpy",
    "scan_weak_norms_numpy",
    "scan_mask_extrema_numpy",
    "dft_stages_numba",
    "scan_lp_norms_numba",
    "scan_weak_norms_numba",
    "scan_mask_extrema_numba",
]

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

_flag = os.environ.get("VILENKIN_NO_NUMBA", "")
USE_NUMBA = HAVE_NUMBA and _flag in ("", "0")


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def _tables_for(radices: tuple[int, ...]):
    system = RadixSystem(radices)
    roots, offs = root_table(radices)
    return digit_matrix(system), roots, offs


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def dft_stages_numpy(values: np.ndarray, radices: tuple[int, ...], inverse: bool = False) -> np.ndarray:
    """Separable transform via an FFT along each digit axis."""
    n = values.size
    arr = values.reshape(tuple(reversed(radices)))
    fn = np.fft.ifft if inverse else np.fft.fft
    for ax in range(arr.ndim):
        arr = fn(arr, axis=ax)
    out = np.ascontiguousarray(arr).reshape(n)
    if inverse:
        out *= n  # undo ifft's per-axis 1/m factors
    return out


class _PsiTracker:
    """Incremental character psi_k on the grid while k counts upward."""

    def __init__(self, k0: int, radices: tuple[int, ...]):
        dig, roots, offs = _tables_for(radices)
        self.radices = radices
        self.axis_roots = [roots[offs[t] + dig[t]] for t in range(len(radices))]
        self.kd = []
        v = k0
        for m in radices:
            self.kd.append(v % m)
            v //= m
        psi = np.ones(dig.shape[1], dtype=np.complex128)
        for t, m in enumerate(radices):
            if self.kd[t]:
                psi *= roots[offs[t] + (self.kd[t] * dig[t]) % m]
        self.psi = psi

    def advance(self) -> None:
        # every digit position touched by the increment contributes one
        # factor r_t (a wrap from m_t-1 to 0 is the same multiplier)
        t = 0
        while True:
            self.psi *= self.axis_roots[t]
            if self.kd[t] + 1 < self.radices[t]:
                self.kd[t] += 1
                return
            self.kd[t] = 0
            t += 1


def _weak_from_sorted_desc(desc: np.ndarray, rank_pow: np.ndarray) -> float:
    return float(np.max(desc * rank_pow)) if desc.size else 0.0


def scan_lp_norms_numpy(S, coeffs, k0, radices, p):
    tracker = _PsiTracker(k0, radices)
    steps = coeffs.size
    out = np.empty(steps)
    inv_n = 1.0 / S.size
    for i in range(steps):
        out[i] = (np.sum(np.abs(S) ** p) * inv_n) ** (1.0 / p)
        S += coeffs[i] * tracker.psi
        if i + 1 < steps:
            tracker.advance()
    return out


def scan_weak_norms_numpy(S, coeffs, k0, radices, p):
    tracker = _PsiTracker(k0, radices)
    steps = coeffs.size
    n = S.size
    rank_pow = (np.arange(1, n + 1) / n) ** (1.0 / p)
    out = np.empty(steps)
    for i in range(steps):
        desc = np.sort(np.abs(S))[::-1]
        out[i] = _weak_from_sorted_desc(desc, rank_pow)
        S += coeffs[i] * tracker.psi
        if i + 1 < steps:
            tracker.advance()
    return out


def scan_mask_extrema_numpy(S, coeffs, k0, radices, mask):
    tracker = _PsiTracker(k0, radices)
    steps = coeffs.size
    lo = np.empty(steps)
    hi = np.empty(steps)
    for i in range(steps):
        a = np.abs(S[mask])
        lo[i] = a.min()
        hi[i] = a.max()
        S += coeffs[i] * tracker.psi
        if i + 1 < steps:
            tracker.advance()
    return lo, hi


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _psi_init(k0, dig, radices, roots, offs):
        depth, n = dig.shape
        psi = np.ones(n, np.complex128)
        kd = np.empty(depth, np.int64)
        v = k0
        for t in range(depth):
            kd[t] = v % radices[t]
            v //= radices[t]
        for t in range(depth):
            if kd[t] != 0:
                m = radices[t]
                base = offs[t]
                for i in range(n):
                    psi[i] *= roots[base + (kd[t] * dig[t, i]) % m]
        return psi, kd

    @njit(cache=True)
    def _psi_advance(psi, kd, dig, radices, roots, offs):
        n = psi.size
        t = 0
        while True:
            base = offs[t]
            for i in range(n):
                psi[i] *= roots[base + dig[t, i]]
            if kd[t] + 1 < radices[t]:
                kd[t] += 1
                return
            kd[t] = 0
            t += 1

    @njit(cache=True)
    def _dft_stages_jit(data, radices, roots, offs, forward):
        n = data.size
        depth = radices.size
        maxm = 2
        for t in range(depth):
            if radices[t] > maxm:
                maxm = radices[t]
        scratch = np.empty(maxm, np.complex128)
        stride = 1
        for t in range(depth):
            m = radices[t]
            base = offs[t]
            block = stride * m
            for start in range(0, n, block):
                for o in range(stride):
                    p0 = start + o
                    for u in range(m):
                        scratch[u] = data[p0 + u * stride]
                    for ku in range(m):
                        acc = 0.0 + 0.0j
                        for xu in range(m):
                            e = (ku * xu) % m
                            if forward and e != 0:
                                e = m - e
                            acc += scratch[xu] * roots[base + e]
                        data[p0 + ku * stride] = acc
            stride = block
        return data

    @njit(cache=True)
    def _scan_lp_jit(S, coeffs, k0, dig, radices, roots, offs, p):
        steps = coeffs.size
        n = S.size
        out = np.empty(steps)
        psi, kd = _psi_init(k0, dig, radices, roots, offs)
        for i in range(steps):
            acc = 0.0
            for x in range(n):
                acc += np.abs(S[x]) ** p
            out[i] = (acc / n) ** (1.0 / p)
            c = coeffs[i]
            for x in range(n):
                S[x] += c * psi[x]
            if i + 1 < steps:
                _psi_advance(psi, kd, dig, radices, roots, offs)
        return out

    @njit(cache=True)
    def _scan_weak_jit(S, coeffs, k0, dig, radices, roots, offs, rank_pow):
        steps = coeffs.size
        n = S.size
        out = np.empty(steps)
        psi, kd = _psi_init(k0, dig, radices, roots, offs)
        for i in range(steps):
            a = np.abs(S)
            a.sort()
            best = 0.0
            for r in range(n):
                v = a[n - 1 - r]
                if v <= best:
                    break  # ranks only shrink the candidate from here on
                cand = v * rank_pow[r]
                if cand > best:
                    best = cand
            out[i] = best
            c = coeffs[i]
            for x in range(n):
                S[x] += c * psi[x]
            if i + 1 < steps:
                _psi_advance(psi, kd, dig, radices, roots, offs)
        return out

    @njit(cache=True)
    def _scan_mask_jit(S, coeffs, k0, dig, radices, roots, offs, mask):
        steps = coeffs.size
        n = S.size
        lo = np.empty(steps)
        hi = np.empty(steps)
        psi, kd = _psi_init(k0, dig, radices, roots, offs)
        for i in range(steps):
            mn = np.inf
            mx = 0.0
            for x in range(n):
                if mask[x]:
                    v = np.abs(S[x])
                    if v < mn:
                        mn = v
                    if v > mx:
                        mx = v
            lo[i] = mn
            hi[i] = mx
            c = coeffs[i]
            for x in range(n):
                S[x] += c * psi[x]
            if i + 1 < steps:
                _psi_advance(psi, kd, dig, radices, roots, offs)
        return lo, hi

    def dft_stages_numba(values, radices, inverse=False):
        _, roots, offs = _tables_for(radices)
        rad = np.asarray(radices, dtype=np.int64)
        return _dft_stages_jit(values, rad, roots, offs, not inverse)

    def scan_lp_norms_numba(S, coeffs, k0, radices, p):
        dig, roots, offs = _tables_for(radices)
        rad = np.asarray(radices, dtype=np.int64)
        return _scan_lp_jit(S, coeffs, k0, dig, rad, roots, offs, p)

    def scan_weak_norms_numba(S, coeffs, k0, radices, p):
        dig, roots, offs = _tables_for(radices)
        rad = np.asarray(radices, dtype=np.int64)
        n = S.size
        rank_pow = (np.arange(1, n + 1) / n) ** (1.0 / p)
        return _scan_weak_jit(S, coeffs, k0, dig, rad, roots, offs, rank_pow)

    def scan_mask_extrema_numba(S, coeffs, k0, radices, mask):
        dig, roots, offs = _tables_for(radices)
        rad = np.asarray(radices, dtype=np.int64)
        return _scan_mask_jit(S, coeffs, k0, dig, rad, roots, offs, mask)

else:  # pragma: no cover - exercised only without numba
    dft_stages_numba = None
    scan_lp_norms_numba = None
    scan_weak_norms_numba = None
    scan_mask_extrema_numba = None


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if USE_NUMBA:
    dft_stages = dft_stages_numba
    scan_lp_norms = scan_lp_norms_numba
    scan_weak_norms = scan_weak_norms_numba
    scan_mask_extrema = scan_mask_extrema_numba
else:
    dft_stages = dft_stages_numpy
    scan_lp_norms = scan_lp_norms_numpy
    scan_weak_norms = scan_weak_norms_numpy
    scan_mask_extrema = scan_mask_extrema_numpy
