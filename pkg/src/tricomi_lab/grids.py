"""Periodic grids, fields, and FFT transforms.

A GridSpec describes the box [-L, L)^n sampled at N points per axis (N a
power of two), so the lattice frequencies are the integer multiples of pi/L
up to the Nyquist limit.  Fields are plain value arrays tied to a grid;
simulation fields are real, but complex values are allowed for the
frequency-bench work.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DomainError, NumericalFailureError

__all__ = ["GridSpec", "Field", "transform", "inverse_transform"]


@dataclass(frozen=True)
class GridSpec:
    n: int
    L: float
    N: int

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2, or 3, got {self.n}")
        if not self.L > 0.0:
            raise DomainError(f"half-width L must be positive, got {self.L}")
        N = self.N
        if not (isinstance(N, (int, np.integer)) and N >= 8 and (N & (N - 1)) == 0):
            raise DomainError(f"N must be a power of two >= 8, got {N!r}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    def axis(self) -> np.ndarray:
        """Sample points of one axis, -L + h*i."""
        return -self.L + self.h * np.arange(self.N)

    def coords(self) -> list[np.ndarray]:
        """Meshgrid coordinate arrays (ij indexing)."""
        ax = self.axis()
        return list(np.meshgrid(*([ax] * self.n), indexing="ij"))

    def radius(self) -> np.ndarray:
        """|x| on the grid."""
        c = self.coords()
        return np.sqrt(sum(x * x for x in c))

    def freq_axis(self) -> np.ndarray:
        """FFT-ordered frequencies of one axis (multiples of pi/L)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.N, d=self.h)

    def freq_grids(self) -> list[np.ndarray]:
        k = self.freq_axis()
        return list(np.meshgrid(*([k] * self.n), indexing="ij"))

    def abs_freq(self) -> np.ndarray:
        """|xi| in FFT ordering."""
        kk = self.freq_grids()
        return np.sqrt(sum(k * k for k in kk))

    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: True on modes kept (|index| < N/3 on every axis)."""
        idx = np.abs(np.fft.fftfreq(self.N) * self.N)
        keep_1d = idx < self.N / 3.0
        mask = np.ones(self.shape, dtype=bool)
        for axis_dim in range(self.n):
            shape = [1] * self.n
            shape[axis_dim] = self.N
            mask &= keep_1d.reshape(shape)
        return mask


@dataclass
class Field:
    grid: GridSpec
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != self.grid.shape:
            raise DomainError(
                f"value shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise NumericalFailureError("field contains non-finite values")

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.h ** self.grid.n * np.sum(np.abs(self.values) ** 2)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def integral(self) -> float:
        return float(self.grid.h ** self.grid.n * np.sum(self.values.real))

    def mass_outside(self, radius: float) -> float:
        """L^2 mass fraction outside |x| > radius (1.0 if the field is zero)."""
        r = self.grid.radius()
        total = float(np.sum(np.abs(self.values) ** 2))
        if total == 0.0:
            return 1.0
        outside = float(np.sum(np.abs(self.values[r > radius]) ** 2))
        return outside / total


def transform(f: Field) -> np.ndarray:
    """Forward FFT of the field values (unnormalized numpy convention)."""
    return np.fft.fftn(f.values)


def inverse_transform(spectrum: np.ndarray, grid: GridSpec, real: bool = True) -> Field:
    """Inverse FFT back to a Field.

    real=True takes the real part, which is exact for conjugate-symmetric
    spectra; pass real=False to keep a complex-valued field.
    """
    spectrum = np.asarray(spectrum)
    if spectrum.shape != grid.shape:
        raise DomainError(
            f"spectrum shape {spectrum.shape} does not match grid {grid.shape}"
        )
    values = np.fft.ifftn(spectrum)
    if real:
        values = values.real
    return Field(grid=grid, values=values)
