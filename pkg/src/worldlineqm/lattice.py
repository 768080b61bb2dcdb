"""Periodic spacetime lattices and unitary spectral transforms.

The transform convention matches the continuum pairing exp(i p.x) with
p.x = -p0 x0 + p_vec . x_vec, so the frequency sign on the time axis is
flipped relative to the space axes.  Forward maps position amplitudes to
momentum amplitudes:

    psi~(p) = (2 pi)^(-D/2) * prod(a_mu) * sum_x psi(x) exp(-i p.x)

and the inverse uses the conjugate kernel with the momentum cell volume
prod(2 pi / L_mu).  Both directions are unitary with respect to the
cell-volume weighted norms (Parseval).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, UnsupportedSpecError


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic D-dimensional lattice: shape N_mu (powers of two), extents L_mu."""

    shape: tuple[int, ...]
    extents: tuple[float, ...]

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        extents = tuple(float(x) for x in self.extents)
        if len(shape) != len(extents):
            raise ContractViolation("shape and extents must have equal length")
        if not all(_is_power_of_two(n) for n in shape):
            raise UnsupportedSpecError(f"axis sizes must be powers of two >= 2, got {shape}")
        if not all(x > 0 for x in extents):
            raise ContractViolation("all extents must be positive")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "extents", extents)

    @property
    def dimension(self) -> int:
        return len(self.shape)

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.extents, self.shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    @property
    def momentum_spacings(self) -> tuple[float, ...]:
        return tuple(2 * np.pi / L for L in self.extents)

    @property
    def momentum_cell_volume(self) -> float:
        return float(np.prod(self.momentum_spacings))

    def axis_coordinates(self, mu: int) -> np.ndarray:
        """Position samples along axis mu: x_j = j * a_mu."""
        a = self.spacings[mu]
        return a * np.arange(self.shape[mu])

    def momentum_axis(self, mu: int) -> np.ndarray:
        """Momentum samples along axis mu in FFT order, spacing 2 pi / L_mu."""
        return 2 * np.pi * np.fft.fftfreq(self.shape[mu], d=self.spacings[mu])

    def momentum_mesh(self) -> list[np.ndarray]:
        axes = [self.momentum_axis(mu) for mu in range(self.dimension)]
        return list(np.meshgrid(*axes, indexing="ij"))

    def p_squared(self, mode: str = "minkowski") -> np.ndarray:
        """Grid of p.p (signed for minkowski, positive for euclidean)."""
        mesh = self.momentum_mesh()
        total = sum(p * p for p in mesh[1:]) if self.dimension > 1 else 0.0
        if mode == "minkowski":
            return total - mesh[0] * mesh[0]
        if mode == "euclidean":
            return total + mesh[0] * mesh[0]
        raise ContractViolation(f"unknown mode {mode!r}")


@dataclass
class ComplexField:
    """Complex amplitudes on a lattice, in position or momentum representation."""

    spec: LatticeSpec
    values: np.ndarray
    representation: str = "position"  # "position" | "momentum"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.spec.shape:
            raise ContractViolation(
                f"field shape {values.shape} does not match lattice {self.spec.shape}"
            )
        if self.representation not in ("position", "momentum"):
            raise ContractViolation(f"unknown representation {self.representation!r}")
        self.values = values

    def norm_squared(self) -> float:
        """Sum of |amplitude|^2 times the cell volume of this representation."""
        w = self.spec.cell_volume if self.representation == "position" else self.spec.momentum_cell_volume
        return float(np.sum(np.abs(self.values) ** 2) * w)

    def copy(self) -> "ComplexField":
        return ComplexField(self.spec, self.values.copy(), self.representation)


def spectral_transform(field: ComplexField, direction: str) -> ComplexField:
    """Unitary lattice Fourier transform with the signed time-axis convention.

    direction "forward" requires a position-representation field and returns
    momentum amplitudes; "inverse" does the opposite.  Round trip is the
    identity to machine precision.
    """
    spec = field.spec
    if not np.all(np.isfinite(field.values)):
        raise ContractViolation("field amplitudes must be finite")
    if direction == "forward":
        if field.representation != "position":
            raise ContractViolation("forward transform expects a position-representation field")
        out = field.values
        # time axis: kernel exp(+i p0 x0) -> inverse-FFT kernel, undo its 1/N
        out = np.fft.ifft(out, axis=0) * spec.shape[0]
        for axis in range(1, spec.dimension):
            out = np.fft.fft(out, axis=axis)
        out = out * (spec.cell_volume * (2 * np.pi) ** (-spec.dimension / 2))
        return ComplexField(spec, out, "momentum")
    if direction == "inverse":
        if field.representation != "momentum":
            raise ContractViolation("inverse transform expects a momentum-representation field")
        out = field.values
        out = np.fft.fft(out, axis=0)
        for axis in range(1, spec.dimension):
            out = np.fft.ifft(out, axis=axis) * spec.shape[axis]
        out = out * (spec.momentum_cell_volume * (2 * np.pi) ** (-spec.dimension / 2))
        return ComplexField(spec, out, "position")
    raise ContractViolation(f"unknown direction {direction!r}")
