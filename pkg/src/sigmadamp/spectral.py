"""Periodic grids, Fourier coefficients, fractional symbols and norms.

Convention: a field on ``[-L, L)^n`` is stored by its coefficients ``c_k`` in
``f(x) = sum_k c_k exp(i xi_k . (x + L))`` with ``xi_k = (pi / L) k``.  Then
``c = fftn(f) / N**n`` and Plancherel reads ``||f||_{L^2}^2 = V * sum |c_k|^2``
with ``V = (2L)^n``.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import GridMismatch

MAX_POINTS_3D = 128


@dataclass(frozen=True)
class SpectralGrid:
    n: int
    points_per_axis: int
    half_length: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"grids support n in {{1, 2, 3}}, got {self.n}")
        N = self.points_per_axis
        if N <= 0 or N % 2:
            raise ValueError(f"points_per_axis must be a positive even integer, got {N}")
        if self.n == 3 and N > MAX_POINTS_3D:
            raise ValueError(f"3-D grids are capped at {MAX_POINTS_3D}^3, got {N}^3")
        if not self.half_length > 0:
            raise ValueError("half_length must be positive")
        object.__setattr__(self, "half_length", float(self.half_length))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.n

    @property
    def dx(self) -> float:
        return 2 * self.half_length / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.dx**self.n

    @property
    def volume(self) -> float:
        return (2 * self.half_length) ** self.n

    @property
    def size(self) -> int:
        return self.points_per_axis**self.n

    @cached_property
    def x(self) -> np.ndarray:
        """1-D node coordinates (shared by every axis)."""
        x = -self.half_length + self.dx * np.arange(self.points_per_axis)
        x.flags.writeable = False
        return x

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*([self.x] * self.n), indexing="ij")

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer mode indices k along one axis, FFT ordering."""
        k = np.fft.fftfreq(self.points_per_axis, d=1.0 / self.points_per_axis)
        k.flags.writeable = False
        return k

    @cached_property
    def xi_mag(self) -> np.ndarray:
        """|xi| on the full mode array; exactly 0 at the zero mode."""
        xi = (np.pi / self.half_length) * self.wavenumbers
        sq = np.zeros(self.shape)
        for axis in range(self.n):
            s = [1] * self.n
            s[axis] = -1
            sq = sq + xi.reshape(s) ** 2
        mag = np.sqrt(sq)
        mag.flags.writeable = False
        return mag

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule: keep modes with |k_i| <= N/3 along every axis."""
        keep1 = np.abs(self.wavenumbers) <= self.points_per_axis / 3
        mask = np.ones(self.shape, dtype=bool)
        for axis in range(self.n):
            s = [1] * self.n
            s[axis] = -1
            mask = mask & keep1.reshape(s)
        mask.flags.writeable = False
        return mask

    def spec(self) -> dict:
        return {"n": self.n, "points_per_axis": self.points_per_axis, "half_length": self.half_length}


class SpectralField:
    """One scalar unknown on a periodic grid, stored by its Fourier coefficients."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: SpectralGrid, values: np.ndarray):
        values = np.asarray(values, dtype=complex)
        if values.shape != grid.shape:
            raise ValueError(f"coefficient shape {values.shape} does not match grid {grid.shape}")
        self.grid = grid
        self.values = values

    @classmethod
    def from_real(cls, grid: SpectralGrid, f: np.ndarray) -> "SpectralField":
        f = np.asarray(f)
        return cls(grid, np.fft.fftn(f) / grid.size)

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def physical(self) -> np.ndarray:
        """Complex real-space samples."""
        return np.fft.ifftn(self.values * self.grid.size)

    def real_view(self) -> np.ndarray:
        return self.physical().real

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.values.copy())

    def check_grid(self, other: "SpectralField"):
        if other.grid != self.grid:
            raise GridMismatch(f"{self.grid} vs {other.grid}")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self.check_grid(other)
        return SpectralField(self.grid, self.values + other.values)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self.check_grid(other)
        return SpectralField(self.grid, self.values - other.values)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def apply(self, symbol: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, self.values * symbol)

    def hermitian_defect(self) -> float:
        """Relative size of the imaginary part of the real-space view."""
        f = self.physical()
        scale = np.max(np.abs(f))
        return 0.0 if scale == 0 else float(np.max(np.abs(f.imag)) / scale)

    def __repr__(self):
        return f"SpectralField(grid={self.grid!r})"


def frac_symbol(grid: SpectralGrid, order: float) -> np.ndarray:
    """Symbol |xi|^order; the zero mode maps to 0 for order > 0 and to 1 for order 0."""
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    if order == 0:
        return np.ones(grid.shape)
    out = np.zeros(grid.shape)
    nz = grid.xi_mag > 0
    out[nz] = grid.xi_mag[nz] ** float(order)
    return out


def sobolev_norm(field: SpectralField, a: float = 0.0, homogeneous: bool = True) -> float:
    """||<D>^a f|| or ||\\|D\\|^a f|| in L^2, by Plancherel."""
    if a < 0:
        raise ValueError("a must be >= 0")
    grid = field.grid
    power = np.abs(field.values) ** 2
    if homogeneous:
        weight = frac_symbol(grid, 2 * a)
    else:
        weight = (1.0 + grid.xi_mag**2) ** float(a)
    return float(np.sqrt(grid.volume * np.sum(weight * power)))


def lr_norm(field: SpectralField, r: float) -> float:
    """Rectangle-rule L^r norm of the real-space view; r = inf gives the max modulus."""
    if not r >= 1:
        raise ValueError(f"r must be in [1, inf], got {r}")
    f = np.abs(field.physical())
    if np.isinf(r):
        return float(f.max())
    return float((field.grid.cell_volume * np.sum(f**r)) ** (1.0 / r))


# --------------------------------------------------------------------------
# named data profiles


def profile(grid: SpectralGrid, name: str, amplitude: float = 1.0, width: float = 1.0, mode: int = 1) -> SpectralField:
    """Real-valued initial datum.

    ``gaussian``: ``A exp(-|x|^2 / width^2)``; ``bump``: smooth compactly
    supported ``A exp(1 - 1/(1 - |x|^2/width^2))`` on ``|x| < width``;
    ``single-mode``: ``A cos(xi_mode x_1)`` with ``xi_mode = pi*mode/L``.
    """
    X = grid.mesh()
    r2 = sum(xi**2 for xi in X)
    if name == "gaussian":
        f = amplitude * np.exp(-r2 / width**2)
    elif name == "bump":
        s = r2 / width**2
        f = np.zeros(grid.shape)
        inside = s < 1
        f[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - s[inside]))
    elif name in ("single-mode", "single_mode"):
        f = amplitude * np.cos(np.pi * mode / grid.half_length * (X[0] + grid.half_length))
    elif name == "zero":
        f = np.zeros(grid.shape)
    else:
        raise ValueError(f"unknown profile {name!r}")
    return SpectralField.from_real(grid, f)


# --------------------------------------------------------------------------
# snapshots

_HEADER = struct.Struct("<3d")


def write_snapshot(path: str | Path, field: SpectralField) -> None:
    """Flat little-endian float64 file: header (n, N, L) then real-space samples in C order."""
    g = field.grid
    data = np.ascontiguousarray(field.real_view(), dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(float(g.n), float(g.points_per_axis), g.half_length))
        fh.write(data.tobytes())


def read_snapshot(path: str | Path) -> SpectralField:
    raw = Path(path).read_bytes()
    n, N, L = _HEADER.unpack_from(raw)
    grid = SpectralGrid(int(n), int(N), L)
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if data.size != grid.size:
        raise ValueError(f"snapshot holds {data.size} values, header implies {grid.size}")
    return SpectralField.from_real(grid, data.reshape(grid.shape))


def write_slice_csv(path: str | Path, field: SpectralField) -> None:
    """Slice along the first axis through the centre of the box."""
    g = field.grid
    f = field.real_view()
    mid = g.points_per_axis // 2
    line = f[(slice(None),) + (mid,) * (g.n - 1)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "value"])
        for xv, fv in zip(g.x, line):
            w.writerow([repr(float(xv)), repr(float(fv))])
