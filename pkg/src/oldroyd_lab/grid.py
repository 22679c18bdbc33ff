"""Periodic grids and sampled fields with paired spectral coefficients.

A :class:`Grid` describes a uniform periodic box ``[0, L)^d`` with an even
number of points per axis.  Real fields are stored in physical space; their
spectral coefficients follow the ``numpy.fft.rfftn`` half-spectrum layout
(Hermitian symmetry is structural, so real values always round-trip).

Transform normalization: forward transforms are unnormalized, the single
``1/N^d`` factor sits on the inverse (numpy's default).  Every norm helper in
the package uses this convention, so Parseval reads
``||f||_L2^2 = vol * sum(w |c|^2) / N^(2d)`` with the half-spectrum doubling
weights ``w``.

Two frequency maps coexist on a grid:

* ``kd``/``k2d`` — "derivative" frequencies with the Nyquist mode zeroed.
  All Fourier-multiplier operators (gradient, divergence, Laplacian, Leray
  projections, fractional Laplacians) use these, which keeps the operator
  algebra (P + Q = I, div P = 0, Lambda^2 = -Laplacian, ...) exact on every
  mode of an even grid.
* ``kmag``/``k2`` — true frequency magnitudes including the Nyquist mode.
  Norms and band-pass filters use these.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GridMismatchError(ValueError):
    """Raised when an operation mixes fields living on different grids."""


# Upper-triangle component order and the (i, j) -> component lookup for
# symmetric tensors, per dimension.
SYM_COMPONENTS = {
    2: ((0, 0), (0, 1), (1, 1)),
    3: ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)),
}
SYM_INDEX = {
    2: ((0, 1), (1, 2)),
    3: ((0, 1, 2), (1, 3, 4), (2, 4, 5)),
}
# L2-norm multiplicity of each stored component (off-diagonals count twice).
SYM_WEIGHTS = {
    2: (1.0, 2.0, 1.0),
    3: (1.0, 2.0, 2.0, 1.0, 2.0, 1.0),
}


@dataclass(frozen=True)
class Grid:
    """Pre-computed spectral quantities for a periodic box.

    Parameters
    ----------
    dim : int
        Spatial dimension, 2 or 3.
    n_per_axis : int
        Points per axis; must be even and at least 8.
    box_length : float
        Physical period per axis.  Mode ``m`` maps to the frequency
        ``xi = 2*pi*m / box_length``.
    """

    dim: int
    n_per_axis: int
    box_length: float

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.n_per_axis % 2 != 0 or self.n_per_axis < 8:
            raise ValueError(
                f"n_per_axis must be even and >= 8, got {self.n_per_axis}"
            )
        if not self.box_length > 0:
            raise ValueError(f"box_length must be positive, got {self.box_length}")

        n = self.n_per_axis
        d = self.dim
        L = float(self.box_length)
        dx = L / n
        two_pi_over_L = 2.0 * np.pi / L

        modes_full = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)   # 0..N/2-1, -N/2..-1
        modes_half = np.arange(n // 2 + 1, dtype=np.int64)           # rfft last axis

        def axis_modes(axis: int) -> np.ndarray:
            m = modes_half if axis == d - 1 else modes_full
            shape = [1] * d
            shape[axis] = m.size
            return m.reshape(shape)

        # True frequencies (Nyquist magnitude N/2) and derivative frequencies
        # (Nyquist zeroed to avoid the sign-ambiguous odd multiplier).
        k_true = []
        k_der = []
        for axis in range(d):
            m = axis_modes(axis)
            k_true.append(two_pi_over_L * m.astype(np.float64))
            kd = two_pi_over_L * np.where(np.abs(m) == n // 2, 0, m).astype(np.float64)
            k_der.append(kd)

        k2_true = sum(k * k for k in k_true)
        k2_der = sum(k * k for k in k_der)

        # Half-spectrum Parseval weights: entries on the last axis double
        # except the self-conjugate planes (index 0 and N/2).
        w = np.full(n // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        wshape = [1] * d
        wshape[-1] = w.size
        rfft_weights = w.reshape(wshape)

        cutoff = n / 3.0
        keep = [np.abs(axis_modes(axis)) <= cutoff for axis in range(d)]
        dealias_mask = keep[0]
        for k in keep[1:]:
            dealias_mask = dealias_mask & k
        nyquist_free = [np.abs(axis_modes(axis)) < n // 2 for axis in range(d)]
        nyq_mask = nyquist_free[0]
        for k in nyquist_free[1:]:
            nyq_mask = nyq_mask & k

        x1 = np.arange(n) * dx

        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "vol", L**d)
        object.__setattr__(self, "npoints", n**d)
        object.__setattr__(self, "shape", (n,) * d)
        object.__setattr__(self, "cshape", (n,) * (d - 1) + (n // 2 + 1,))
        object.__setattr__(self, "modes", modes_full)
        object.__setattr__(self, "kd", tuple(k_der))
        object.__setattr__(self, "k2d", k2_der)
        object.__setattr__(self, "kmag", np.sqrt(k2_true))
        object.__setattr__(self, "k2", k2_true)
        object.__setattr__(self, "rfft_weights", rfft_weights)
        object.__setattr__(self, "dealias_mask", dealias_mask)
        object.__setattr__(self, "nyquist_free_mask", nyq_mask)
        object.__setattr__(self, "x1d", x1)

    # -- transforms --------------------------------------------------------

    def rfft(self, values: np.ndarray) -> np.ndarray:
        """Forward transform over the trailing ``dim`` axes (unnormalized)."""
        return np.fft.rfftn(values, axes=tuple(range(-self.dim, 0)))

    def irfft(self, coeffs: np.ndarray) -> np.ndarray:
        """Inverse transform carrying the 1/N^d normalization."""
        return np.fft.irfftn(coeffs, s=self.shape, axes=tuple(range(-self.dim, 0)))

    # -- coordinates and integrals -----------------------------------------

    def coords(self) -> tuple[np.ndarray, ...]:
        """Meshgrid of physical coordinates, ``ij`` indexing."""
        return tuple(np.meshgrid(*([self.x1d] * self.dim), indexing="ij"))

    def integrate(self, values: np.ndarray) -> float | np.ndarray:
        """Spectrally exact integral over the box: vol times the mean."""
        return self.vol * values.mean(axis=tuple(range(-self.dim, 0)))

    def spectral_sumsq(self, coeffs: np.ndarray) -> float:
        """Full-spectrum sum of |c|^2 reconstructed from the rfft half."""
        return float(np.sum(self.rfft_weights * np.abs(coeffs) ** 2))

    def zeros(self, ncomp: int | None = None) -> np.ndarray:
        shape = self.shape if ncomp is None else (ncomp,) + self.shape
        return np.zeros(shape)

    def compatible(self, other: "Grid") -> bool:
        return (
            self.dim == other.dim
            and self.n_per_axis == other.n_per_axis
            and np.isclose(self.box_length, other.box_length)
        )


def build_grid(dim: int, n_per_axis: int, box_length: float) -> Grid:
    """Construct a periodic grid; rejects odd/too-small N and bad lengths."""
    return Grid(dim=dim, n_per_axis=int(n_per_axis), box_length=float(box_length))


def check_same_grid(*fields) -> Grid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid is not grid and not grid.compatible(f.grid):
            raise GridMismatchError("fields live on different grids")
    return grid


@dataclass
class ScalarField:
    """A real scalar sample array on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"scalar values shape {self.values.shape} != grid {self.grid.shape}"
            )

    @property
    def coefficients(self) -> np.ndarray:
        return self.grid.rfft(self.values)

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())


@dataclass
class VectorField:
    """A real vector sample array, components stacked on the leading axis."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.dim,) + self.grid.shape:
            raise ValueError(
                f"vector values shape {self.values.shape} incompatible with grid"
            )

    @property
    def coefficients(self) -> np.ndarray:
        return self.grid.rfft(self.values)

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.values.copy())


@dataclass
class SymTensorField:
    """A symmetric tensor stored as its upper triangle.

    Component order is row-major over the upper triangle: ``(xx, xy, yy)``
    in 2D, ``(xx, xy, xz, yy, yz, zz)`` in 3D.  Expansion to the full matrix
    is symmetric by construction.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        ncomp = self.grid.dim * (self.grid.dim + 1) // 2
        if self.values.shape != (ncomp,) + self.grid.shape:
            raise ValueError(
                f"sym tensor values shape {self.values.shape} incompatible with grid"
            )

    @property
    def ncomp(self) -> int:
        return self.values.shape[0]

    @property
    def coefficients(self) -> np.ndarray:
        return self.grid.rfft(self.values)

    def component(self, i: int, j: int) -> np.ndarray:
        return self.values[SYM_INDEX[self.grid.dim][i][j]]

    def expand(self) -> np.ndarray:
        """Full (d, d, ...) array; symmetric because entries are shared."""
        d = self.grid.dim
        out = np.empty((d, d) + self.grid.shape)
        for i in range(d):
            for j in range(d):
                out[i, j] = self.component(i, j)
        return out

    def copy(self) -> "SymTensorField":
        return SymTensorField(self.grid, self.values.copy())


Field = ScalarField | VectorField | SymTensorField
