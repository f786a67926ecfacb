"""Characters of the group and the discrete character transform.

The character system is the tensor product of the cyclic characters of
each coordinate: psi_n(x) = prod_t r_t(x)^{n_t} with r_t(x) =
exp(2*pi*i*x_t/m_t).  Coefficients carry the Haar factor,
coeffs[k] = (1/M_A) * sum_x f(x) * conj(psi_k(x)), so they equal the
integral of f against conj(psi_k); the inverse sum carries no factor.

``naive_transform`` evaluates the defining sums directly and serves as
the correctness oracle for ``fast_transform``, which runs the staged
mixed-radix kernel from :mod:`vilenkin.accel`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import accel
from ._tables import root_table
from .radix import Coset, GroupPoint, RadixError, RadixSystem, VIndex, decompose, digit_matrix

__all__ = [
    "GridFunction",
    "Spectrum",
    "rademacher",
    "character",
    "rademacher_on_grid",
    "character_on_grid",
    "coset_indicator",
    "naive_transform",
    "fast_transform",
    "inverse_transform",
]


@dataclass
class GridFunction:
    """A function on the group constant on rank-A cosets: M_A complex values.

    ``values[i]`` is the value on the coset anchored at the grid point
    with index i.  The integral against Haar measure is the plain mean.
    """

    system: RadixSystem
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.system.size,):
            raise ValueError(
                f"expected {self.system.size} values, got shape {vals.shape}"
            )
        self.values = vals

    @property
    def resolution(self) -> int:
        return self.system.depth

    def integral(self) -> complex:
        return complex(self.values.mean())

    def copy(self) -> "GridFunction":
        return GridFunction(self.system, self.values.copy())

    def _check_same_system(self, other: "GridFunction") -> None:
        if self.system != other.system:
            raise ValueError("grid functions live on different systems")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_system(other)
        return GridFunction(self.system, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_system(other)
        return GridFunction(self.system, self.values - other.values)

    def __mul__(self, scalar) -> "GridFunction":
        return GridFunction(self.system, self.values * scalar)

    __rmul__ = __mul__

    def to_csv(self, path) -> None:
        _write_csv(path, self.values)

    @classmethod
    def from_csv(cls, path, system: RadixSystem) -> "GridFunction":
        return cls(system, _read_csv(path, system.size))


@dataclass
class Spectrum:
    """Transform coefficients indexed by the same digit order as the grid."""

    system: RadixSystem
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.coeffs, dtype=np.complex128)
        if vals.shape != (self.system.size,):
            raise ValueError(
                f"expected {self.system.size} coefficients, got shape {vals.shape}"
            )
        self.coeffs = vals

    @property
    def resolution(self) -> int:
        return self.system.depth

    def copy(self) -> "Spectrum":
        return Spectrum(self.system, self.coeffs.copy())

    def to_csv(self, path) -> None:
        _write_csv(path, self.coeffs)

    @classmethod
    def from_csv(cls, path, system: RadixSystem) -> "Spectrum":
        return cls(system, _read_csv(path, system.size))


def _write_csv(path, values: np.ndarray) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("index,real,imag\n")
        for i, v in enumerate(values):
            fh.write(f"{i},{v.real!r},{v.imag!r}\n")


def _read_csv(path, expected: int) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] != expected:
        raise ValueError(f"expected {expected} rows, got {data.shape[0]}")
    order = np.argsort(data[:, 0])
    return data[order, 1] + 1j * data[order, 2]


def rademacher(system: RadixSystem, k: int, x: GroupPoint) -> complex:
    """r_k(x) = exp(2*pi*i*x_k/m_k)."""
    if not 0 <= k < system.depth:
        raise RadixError(f"position {k} outside depth {system.depth}")
    roots, offs = root_table(system.radices)
    return complex(roots[offs[k] + x.coords[k] % system.radices[k]])


def character(system: RadixSystem, n: int | VIndex, x: GroupPoint) -> complex:
    """psi_n(x), the product of digit-wise powers of the r_k."""
    idx = n if isinstance(n, VIndex) else decompose(n, system)
    roots, offs = root_table(system.radices)
    out = 1.0 + 0.0j
    for t, d in enumerate(idx.digits):
        if d:
            m = system.radices[t]
            out *= roots[offs[t] + (d * x.coords[t]) % m]
    return complex(out)


def rademacher_on_grid(system: RadixSystem, k: int) -> np.ndarray:
    """r_k evaluated at every grid point."""
    if not 0 <= k < system.depth:
        raise RadixError(f"position {k} outside depth {system.depth}")
    roots, offs = root_table(system.radices)
    return roots[offs[k] + digit_matrix(system)[k]]


def character_on_grid(system: RadixSystem, n: int | VIndex) -> np.ndarray:
    """psi_n evaluated at every grid point."""
    idx = n if isinstance(n, VIndex) else decompose(n, system)
    roots, offs = root_table(system.radices)
    dig = digit_matrix(system)
    out = np.ones(system.size, dtype=np.complex128)
    for t, d in enumerate(idx.digits):
        if d:
            m = system.radices[t]
            out = out * roots[offs[t] + (d * dig[t]) % m]
    return out


def coset_indicator(system: RadixSystem, c: Coset) -> np.ndarray:
    """0/1 array marking the coset's grid points."""
    from .radix import coset_indices

    out = np.zeros(system.size)
    out[coset_indices(c, system)] = 1.0
    return out


def naive_transform(f: GridFunction) -> Spectrum:
    """Coefficients by the defining inner products, one index at a time.

    Quadratic cost; kept as the independent oracle for the fast path.
    """
    system = f.system
    n = system.size
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        out[k] = np.vdot(character_on_grid(system, k), f.values) / n
    return Spectrum(system, out)


def fast_transform(f: GridFunction) -> Spectrum:
    """Coefficients via the staged mixed-radix kernel, O(M_A * sum m_t)."""
    data = accel.dft_stages(f.values.copy(), f.system.radices, inverse=False)
    return Spectrum(f.system, data / f.system.size)


def inverse_transform(s: Spectrum) -> GridFunction:
    """values[x] = sum_k coeffs[k] * psi_k(x)."""
    data = accel.dft_stages(s.coeffs.copy(), s.system.radices, inverse=True)
    return GridFunction(s.system, data)
