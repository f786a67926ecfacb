"""Precomputed root-of-unity tables shared by the transform kernels.

Roots are snapped to exact integers where the true value is 0 or +-1 so
that the radix-2 (Walsh) case stays exact in floating point.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["root_table"]

_SNAP = 1e-12


@lru_cache(maxsize=32)
def root_table(radices: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Flat table of exp(2*pi*i*u/m_t) per position, with offsets.

    Returns ``(roots, offsets)`` where ``roots[offsets[t] + u]`` is the
    u-th power of the primitive m_t-th root of unity, u in [0, m_t).
    """
    offsets = np.empty(len(radices), dtype=np.int64)
    chunks = []
    pos = 0
    for t, m in enumerate(radices):
        offsets[t] = pos
        w = np.exp(2j * np.pi * np.arange(m) / m)
        re, im = w.real.copy(), w.imag.copy()
        re[np.abs(re - np.round(re)) < _SNAP] = np.round(re[np.abs(re - np.round(re)) < _SNAP])
        im[np.abs(im - np.round(im)) < _SNAP] = np.round(im[np.abs(im - np.round(im)) < _SNAP])
        chunks.append(re + 1j * im)
        pos += m
    roots = np.concatenate(chunks)
    roots.setflags(write=False)
    offsets.setflags(write=False)
    return roots, offsets
