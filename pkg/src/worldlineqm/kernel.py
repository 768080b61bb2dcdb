"""Fixed-length transition kernels and proper-time propagators.

The free kernel of a mass-m scalar over intrinsic length T is

    K(dx; T) = (2 pi)^(-D) Int d^D p  exp(i p.dx) exp(-i T (p.p + m^2)),

a product of one Gaussian/Fresnel factor per axis.  Closed under the signed
metric it evaluates to

    K(dx; T) = (4 pi T)^(-D/2) exp(-i pi (D-2)/4) exp(i dx.dx / 4T - i T m^2)

in minkowski mode, and to the heat kernel
(4 pi tau)^(-D/2) exp(-|dx|^2/4tau - tau m^2) in euclidean mode.

Oscillatory minkowski integrals are always evaluated with explicit damping:
a convergence factor exp(-T epsilon) on proper-time integrals and a Gaussian
factor exp(-damping |p|_E^2) on momentum integrals.  Quoted tolerances of
the damped routes scale with the damping used.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import (
    ContractViolation,
    DegeneratePathError,
    DomainError,
    UnsupportedSpecError,
)
from .geometry import FourVector
from .lattice import ComplexField, LatticeSpec, spectral_transform


@dataclass(frozen=True)
class KernelParams:
    """Inputs of a kernel evaluation: mass, intrinsic length, dimension, mode."""

    mass: float
    total_length: float
    dimension: int
    mode: str = "minkowski"
    epsilon: float = 1e-3

    def __post_init__(self):
        if self.mass <= 0:
            raise ContractViolation("mass must be positive")
        if self.total_length <= 0:
            raise DomainError("intrinsic length T must be positive")
        if self.mode not in ("minkowski", "euclidean"):
            raise ContractViolation(f"unknown mode {self.mode!r}")
        if self.epsilon <= 0:
            raise ContractViolation("epsilon must be positive")


@dataclass(frozen=True)
class WeightFunction:
    """Weight f(T) over intrinsic path lengths.

    kind "uniform" is f = 1.  kind "gaussian-thresholded" is
    f(T) = exp(-T^2 / 2 dlam^2) for T > delta and 0 for T <= delta;
    the threshold is what enforces the spectral cancellation conditions
    used by the regulator module.
    """

    kind: str = "uniform"
    correlation_length: float | None = None  # dlam, units mass^-2
    threshold: float = 0.0                   # delta, units mass^-2

    def __post_init__(self):
        if self.kind not in ("uniform", "gaussian-thresholded"):
            raise ContractViolation(f"unknown weight kind {self.kind!r}")
        if self.kind == "gaussian-thresholded":
            if self.correlation_length is None or self.correlation_length <= 0:
                raise ContractViolation("gaussian-thresholded weight needs correlation_length > 0")
            if self.threshold < 0:
                raise ContractViolation("threshold must be >= 0")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "uniform":
            out = np.ones_like(t)
        else:
            out = np.exp(-t * t / (2.0 * self.correlation_length ** 2))
            out = np.where(t > self.threshold, out, 0.0)
        if out.ndim == 0:
            return float(out)
        return out

    @classmethod
    def uniform(cls) -> "WeightFunction":
        return cls("uniform")

    @classmethod
    def gaussian(cls, correlation_length: float, threshold: float) -> "WeightFunction":
        return cls("gaussian-thresholded", correlation_length, threshold)


# ---------------------------------------------------------------------------
# closed-form kernels


def _axis_widths(t, dimension: int, mode: str, damping: float = 0.0,
                 damp_time_only: bool = False):
    """Complex Gaussian width per axis: factor (2pi)^-1 sqrt(pi/a) exp(-u^2/4a)."""
    space_damping = 0.0 if damp_time_only else damping
    if mode == "euclidean":
        a_time = damping + t
        a_space = space_damping + t
    else:
        a_time = damping - 1j * t
        a_space = space_damping + 1j * t
    return [a_time] + [a_space] * (dimension - 1)


def _kernel_value(dx, t, mass_squared, dimension: int, mode: str, damping: float = 0.0,
                  damp_time_only: bool = False):
    """Kernel value from the per-axis Gaussian factors; t may be an array."""
    t = np.asarray(t, dtype=float)
    widths = _axis_widths(t, dimension, mode, damping, damp_time_only)
    value = np.ones_like(t, dtype=complex)
    for mu in range(dimension):
        a = widths[mu]
        value = value * np.sqrt(np.pi / a) / (2 * np.pi) * np.exp(-dx[mu] ** 2 / (4 * a))
    if mode == "euclidean":
        value = value * np.exp(-t * mass_squared)
    else:
        value = value * np.exp(-1j * t * mass_squared)
    if value.ndim == 0:
        return complex(value)
    return value


def kernel_closed(dx: FourVector, params: KernelParams) -> complex:
    """Closed-form kernel K(dx; T) for the given parameters."""
    if dx.dimension != params.dimension:
        raise ContractViolation("dx dimension does not match params")
    return _kernel_value(dx.as_array(), params.total_length,
                         params.mass ** 2, params.dimension, params.mode)


def kernel_damped(dx: FourVector, total_length: float, mass_squared,
                  dimension: int, damping: float, mode: str = "minkowski",
                  damp_time_only: bool = False) -> complex:
    """Kernel with the Gaussian momentum damping exp(-damping |p|_E^2) folded in.

    mass_squared may be negative or complex; the damping keeps every axis
    factor a convergent Gaussian.  damp_time_only restricts the damping to the
    frequency axis (the spatial axes stay exact Fresnel factors), which is the
    variant reconstructed by the mass-superposition route.
    """
    if damping < 0:
        raise DomainError("damping must be >= 0")
    return _kernel_value(dx.as_array(), total_length, mass_squared, dimension,
                         mode, damping, damp_time_only)


# ---------------------------------------------------------------------------
# discretized collapse


def segment_norm(dlam: float, dimension: int, mode: str) -> complex:
    """Per-segment normalization: (4 pi dlam)^(-D/2) with the mode phase.

    In minkowski mode the phase is exp(-i pi (D-2)/4) per segment (one
    exp(+i pi/4) time factor against D-1 exp(-i pi/4) space factors), which
    for D = 4 is the familiar -i (4 pi dlam)^-2.  With this choice the
    collapsed prefactor of the discretized kernel is exactly 1.
    """
    if dlam <= 0:
        raise DegeneratePathError("segment length must be positive")
    mag = (4 * np.pi * dlam) ** (-dimension / 2)
    if mode == "euclidean":
        return complex(mag)
    return complex(mag * np.exp(-1j * np.pi * (dimension - 2) / 4))


def discretization_norm(segments, dimension: int, mode: str) -> complex:
    """Product of the per-segment normalization factors."""
    out = complex(1.0)
    for dlam in segments:
        out *= segment_norm(float(dlam), dimension, mode)
    return out


def kernel_discretized(x: FourVector, x0: FourVector, segments, params: KernelParams) -> complex:
    """Collapse the N-segment discretized path integral analytically.

    Each segment carries a Gaussian factor per axis; interior points are
    integrated out one at a time (complex Gaussian convolution, widths add
    harmonically in the exponent and linearly in the 1/4a form).  With the
    segment normalization above the result is independent of N and of the
    individual segment lengths, and equals kernel_closed at the same total T.
    """
    segments = np.asarray(segments, dtype=float)
    if segments.ndim != 1 or segments.size < 1:
        raise ContractViolation("segments must be a non-empty 1-d sequence")
    if np.any(segments <= 0):
        raise DegeneratePathError("all segment lengths must be positive")
    total = float(np.sum(segments))
    if abs(total - params.total_length) > 1e-9 * max(1.0, params.total_length):
        raise ContractViolation(
            f"segments sum to {total}, expected T = {params.total_length}")
    dx = (x - x0).as_array()
    if x.dimension != params.dimension:
        raise ContractViolation("point dimension does not match params")

    msq = params.mass ** 2
    prefactor = complex(1.0)
    # accumulated width per axis; segment j has width a_j per axis
    acc = None
    for dlam in segments:
        widths = _axis_widths(float(dlam), params.dimension, params.mode)
        # own normalization of this segment: (2pi)^-1 sqrt(pi/a) per axis
        for a in widths:
            prefactor *= np.sqrt(np.pi / a) / (2 * np.pi)
        if acc is None:
            acc = list(widths)
        else:
            for mu, a in enumerate(widths):
                # Int du exp(-u^2/4A) exp(-(v-u)^2/4a) = sqrt(4 pi A a/(A+a)) exp(-v^2/4(A+a))
                big_a = acc[mu]
                prefactor *= np.sqrt(4 * np.pi * big_a * a / (big_a + a))
                acc[mu] = big_a + a
        if params.mode == "euclidean":
            prefactor *= np.exp(-float(dlam) * msq)
        else:
            prefactor *= np.exp(-1j * float(dlam) * msq)
    value = prefactor
    for mu in range(params.dimension):
        value *= np.exp(-dx[mu] ** 2 / (4 * acc[mu]))
    return complex(value)


# ---------------------------------------------------------------------------
# euclidean Monte Carlo


@dataclass(frozen=True)
class MCResult:
    estimate: complex
    stderr: float
    samples: int
    seed: int


def kernel_mc(x: FourVector, x0: FourVector, params: KernelParams, n_segments: int,
              samples: int, seed: int, chunk_size: int = 16384,
              mass_sq_fn=None, mass_sq_bound: float | None = None) -> MCResult:
    """Monte Carlo estimate of the euclidean kernel over pinned bridge paths.

    Paths are sampled from the exact Gaussian kinetic bridge measure between
    x0 and x (its normalization is the known massless kernel, absorbed
    analytically).  The mass factor exp(-Int m^2(q) dlam) is estimated
    without bias by thinning: Poisson marks at rate mass_sq_bound along the
    path, each accepted with probability m^2(q)/bound evaluated at the
    sampled bridge position; a path contributes iff no mark is accepted.
    For the constant-mass kernel the estimator is exact at m = 0 (zero
    variance) and satisfies the usual CLT contract otherwise.

    Deterministic for a fixed (seed, chunk_size).
    """
    if params.mode != "euclidean":
        raise UnsupportedSpecError("oscillatory minkowski Monte Carlo is not supported")
    if samples < 1000:
        raise ContractViolation("need at least 10^3 samples")
    if n_segments < 1:
        raise ContractViolation("need at least one segment")
    tau = params.total_length
    dim = params.dimension
    dx = (x - x0).as_array()
    msq = params.mass ** 2
    bound = float(mass_sq_bound) if mass_sq_bound is not None else msq
    if mass_sq_fn is not None and bound <= 0:
        raise ContractViolation("mass_sq_bound must be positive with a custom mass_sq_fn")

    norm = _kernel_value(dx, tau, 0.0, dim, "euclidean").real  # massless bridge normalization
    dlam = tau / n_segments
    grid = dlam * np.arange(n_segments + 1)

    total_n = 0
    mean = 0.0
    m2 = 0.0  # sum of squared deviations (Welford)
    n_chunks = (samples + chunk_size - 1) // chunk_size
    for chunk_index in range(n_chunks):
        n = min(chunk_size, samples - chunk_index * chunk_size)
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), chunk_index)))
        paths = _sample_bridges(rng, dx, tau, n_segments, dim, n)
        if bound == 0.0:
            alive = np.ones(n)
        else:
            counts = rng.poisson(bound * tau, size=n)
            if mass_sq_fn is None:
                alive = (counts == 0).astype(float)
            else:
                alive = _thin_marks(rng, paths, grid, counts, mass_sq_fn, bound)
        c_mean = float(np.mean(alive))
        c_m2 = float(np.sum((alive - c_mean) ** 2))
        delta = c_mean - mean
        new_n = total_n + n
        m2 += c_m2 + delta * delta * total_n * n / new_n
        mean += delta * n / new_n
        total_n = new_n

    var = m2 / (total_n - 1) if total_n > 1 else 0.0
    stderr = norm * np.sqrt(var / total_n)
    return MCResult(estimate=complex(norm * mean), stderr=float(stderr),
                    samples=total_n, seed=int(seed))


def _sample_bridges(rng, dx, tau, n_segments, dim, n):
    """Pinned Gaussian bridges from 0 to dx; increments have variance 2 dlam."""
    dlam = tau / n_segments
    paths = np.zeros((n, n_segments + 1, dim))
    paths[:, -1, :] = dx
    rem = tau
    for j in range(1, n_segments):
        prev = paths[:, j - 1, :]
        mean = prev + (dx - prev) * (dlam / rem)
        var = 2.0 * dlam * (rem - dlam) / rem
        paths[:, j, :] = mean + np.sqrt(var) * rng.standard_normal((n, dim))
        rem -= dlam
    return paths


def _thin_marks(rng, paths, grid, counts, mass_sq_fn, bound):
    n = counts.size
    alive = np.ones(n)
    kmax = int(counts.max()) if n else 0
    if kmax == 0:
        return alive
    tau = grid[-1]
    lam_marks = rng.uniform(0.0, tau, size=(n, kmax))
    u = rng.uniform(0.0, 1.0, size=(n, kmax))
    # linear interpolation of bridge positions at the mark parameters
    idx = np.clip((lam_marks / (grid[1] - grid[0])).astype(int), 0, len(grid) - 2)
    frac = (lam_marks - grid[idx]) / (grid[1] - grid[0])
    rows = np.arange(n)[:, None]
    pos = paths[rows, idx, :] * (1 - frac[..., None]) + paths[rows, idx + 1, :] * frac[..., None]
    ratio = np.asarray(mass_sq_fn(pos)) / bound
    accepted = (u < ratio) & (np.arange(kmax)[None, :] < counts[:, None])
    alive[accepted.any(axis=1)] = 0.0
    return alive


# ---------------------------------------------------------------------------
# proper-time propagators


def _cquad(func, a, b, **kw):
    value, err = integrate.quad(func, a, b, complex_func=True, **kw)
    return value, err


def _gl_nodes(edges, order: int):
    """Gauss-Legendre nodes/weights on a sequence of panels."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _panel_edges(t_lo: float, t_hi: float, osc_scale: float, n_geom: int = 40):
    """Geometric panels resolving the t -> 0 structure, then uniform panels
    no wider than a quarter oscillation period."""
    geom_hi = min(1.0, t_hi)
    edges = list(np.geomspace(t_lo, geom_hi, n_geom))
    if t_hi > geom_hi:
        width = min(0.25, np.pi / (2 * max(osc_scale, 1e-12)))
        edges.extend(np.arange(geom_hi + width, t_hi + width, width))
    return np.asarray(edges)


def propagator_position(dx: FourVector, mass: float, epsilon: float,
                        weight: WeightFunction, dimension: int,
                        mode: str = "euclidean", damping: float = 0.0) -> complex:
    """Proper-time propagator Int_0^inf dT f(T) K(dx; T) exp(-T epsilon).

    Euclidean mode integrates the real heat kernel.  Minkowski mode uses the
    Gaussian-damped kernel and requires damping > 0; the result approaches
    the Feynman propagator as (epsilon, damping) -> 0.
    """
    if epsilon < 0:
        raise DomainError("epsilon must be >= 0")
    if epsilon == 0 and weight.kind == "uniform":
        raise DomainError("uniform weight needs epsilon > 0 for the T-integral")
    dxa = dx.as_array()
    msq = mass * mass
    if mode == "euclidean":
        def integrand(t):
            return float(weight(t) * _kernel_value(dxa, t, msq, dimension, "euclidean").real
                         * np.exp(-epsilon * t))
        lo = weight.threshold if weight.kind == "gaussian-thresholded" else 0.0
        value, _ = integrate.quad(integrand, lo, np.inf, limit=300)
        return complex(value)
    if mode == "minkowski":
        if damping <= 0:
            raise DomainError("minkowski proper-time integral needs damping > 0")

        def integrand(t):
            return (weight(t) * _kernel_value(dxa, t, msq, dimension, "minkowski", damping)
                    * np.exp(-epsilon * t))
        lo = weight.threshold if weight.kind == "gaussian-thresholded" else 0.0
        value, _ = _cquad(integrand, lo, np.inf, limit=400)
        return complex(value)
    raise ContractViolation(f"unknown mode {mode!r}")


def propagator_momentum(p: FourVector, mass: float, epsilon: float) -> complex:
    """Feynman propagator -i / (p.p + m^2 - i epsilon), signed p.p."""
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    from .geometry import minkowski_dot

    return -1j / (minkowski_dot(p, p) + mass * mass - 1j * epsilon)


def propagator_onshell_part(dx: FourVector, mass: float, sign: int,
                            damping: float, dimension: int) -> complex:
    """Positive/negative frequency part of the propagator.

    Evaluates (2 pi)^(-d) Int d^d p exp(i(-sign E_p dx0 + p.dx)) / (2 E_p)
    with Gaussian damping exp(-damping p^2) on the spatial momentum integral
    (d = D - 1).  sign=+1 is the positive-frequency (particle) part.
    """
    if sign not in (+1, -1):
        raise ContractViolation("sign must be +1 or -1")
    if damping <= 0:
        raise DomainError("damping must be positive")
    d = dimension - 1
    dt = dx.time
    r = np.linalg.norm(dx.spatial) if d else 0.0
    msq = mass * mass

    if d == 1:
        def integrand(p):
            e = np.sqrt(p * p + msq)
            return np.exp(1j * (-sign * e * dt + p * r) - damping * p * p) / (2 * e)
        value, _ = _cquad(integrand, -np.inf, np.inf, limit=400)
        return complex(value / (2 * np.pi))
    if d == 3:
        def integrand(p):
            e = np.sqrt(p * p + msq)
            if r > 0:
                ang = 4 * np.pi * np.sin(p * r) / (p * r) if p > 0 else 4 * np.pi
            else:
                ang = 4 * np.pi
            return p * p * ang * np.exp(-1j * sign * e * dt - damping * p * p) / (2 * e)
        value, _ = _cquad(integrand, 0.0, np.inf, limit=400)
        return complex(value / (2 * np.pi) ** 3)
    raise UnsupportedSpecError(f"spatial dimension d = {d} not supported")


@dataclass(frozen=True)
class MassSuperpositionResult:
    value: complex
    window: float
    spacing: float
    adequate_window: bool
    mass_sq_grid: np.ndarray = field(repr=False, default=None)


def fixed_mass_propagator(dx: FourVector, mass_squared: float, epsilon: float,
                          dimension: int, damping: float) -> complex:
    """Regulated propagator at fixed (possibly negative) mass squared.

    Evaluates -i (2 pi)^(-D) Int d^D p exp(i p.dx) exp(-damping p0^2)
    / (p.p + m'^2 - i eps): the spatial momentum integral is done in closed
    form, leaving a single damped frequency quadrature.  This is the
    T-integral of the time-axis-damped kernel, expressed without the long
    oscillatory proper-time tail.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if damping <= 0:
        raise DomainError("damping must be positive")
    d = dimension - 1
    if d not in (1, 3):
        raise UnsupportedSpecError(f"spatial dimension d = {d} not supported")
    dt = dx.time
    r = float(np.linalg.norm(dx.spatial))
    if d == 3 and r == 0.0:
        raise DomainError("the D=4 spatial integral needs |dx_vec| > 0")

    half = np.sqrt(37.0 / damping)
    width = np.pi / (2 * (abs(dt) + r + 1.0))
    edges = [np.arange(-half, half + width, width)]
    if mass_squared > 0:
        # refine around the near-singular pinch at p0 = +-sqrt(m'^2)
        pstar = np.sqrt(mass_squared)
        scale = epsilon / (2 * pstar + 1.0)
        for s in (-1.0, 1.0):
            steps = s * np.geomspace(scale / 4, width, 25)
            edges.append(pstar + steps)
            edges.append(-pstar + steps)
    grid = np.unique(np.concatenate(edges))
    grid = grid[(grid >= -half) & (grid <= half)]
    nodes, weights = _gl_nodes(grid, order=10)

    c = mass_squared - nodes * nodes - 1j * epsilon
    root = np.sqrt(c)  # principal branch, Re > 0
    if d == 1:
        spatial = np.pi * np.exp(-root * r) / root
    else:
        spatial = 2 * np.pi ** 2 * np.exp(-root * r) / r
    value = np.sum(weights * np.exp(-1j * nodes * dt - damping * nodes * nodes) * spatial)
    return complex(-1j * value / (2 * np.pi) ** dimension)


def euclidean_mass_propagator_batch(dx: FourVector, mass_squared, dimension: int) -> np.ndarray:
    """Euclidean propagators at an array of complex mass squares, Re > 0.

    Shared proper-time Gauss-Legendre panel quadrature of
    (4 pi T)^(-D/2) exp(-|dx|^2/4T - T m'^2); needs |dx| > 0 for D >= 2.
    """
    msq = np.atleast_1d(np.asarray(mass_squared, dtype=complex))
    if np.any(np.real(msq) <= 0):
        raise DomainError("need Re(mass_squared) > 0 in euclidean mode")
    dxa = dx.as_array()
    rsq = float(dxa @ dxa)
    if rsq == 0.0:
        raise DomainError("euclidean mass propagator needs |dx| > 0")
    re_min = float(np.min(np.real(msq)))
    t_hi = 40.0 / re_min
    t_lo = rsq / 400.0
    osc = float(np.max(np.abs(np.imag(msq))))
    nodes, weights = _gl_nodes(_panel_edges(t_lo, t_hi, osc), order=10)
    pref = (4 * np.pi * nodes) ** (-dimension / 2) * np.exp(-rsq / (4 * nodes))
    out = np.empty(msq.shape, dtype=complex)
    chunk = max(1, int(4e6 // nodes.size))
    for k in range(0, msq.size, chunk):
        block = msq[k:k + chunk]
        vals = pref[None, :] * np.exp(-np.outer(block, nodes))
        out[k:k + chunk] = vals @ weights
    return out


def euclidean_mass_propagator(dx: FourVector, mass_squared: complex,
                              dimension: int) -> complex:
    """Euclidean propagator at a single complex mass squared with Re > 0."""
    return complex(euclidean_mass_propagator_batch(dx, [mass_squared], dimension)[0])


def kernel_mass_superposition(dx: FourVector, total_length: float, mass: float,
                              epsilon: float, mass_sq_grid, dimension: int,
                              damping: float = 1e-3,
                              mode: str = "euclidean") -> MassSuperpositionResult:
    """Reconstruct K(dx; T) as a superposition of fixed-mass propagators,

        K = (2 pi)^-1 exp(-i T m^2) Int dm'^2 exp(i T m'^2) prop(dx; m'^2),

    by trapezoid quadrature over the supplied mass-squared grid.  The window
    half-width W must satisfy W*T >> 2 pi; W*T < 4 pi sets
    adequate_window = False.

    mode "euclidean" runs the continuation T -> -i tau with the mass-squared
    contour rotated to m'^2 = m^2 + i u (grid values supply m^2 + u): every
    propagator is then off its pole and the integrand decays exponentially in
    u, so the reconstruction converges to the euclidean kernel as the window
    grows and the grid refines.  mode "minkowski" keeps the real-axis grid
    with epsilon-regulated, frequency-damped propagators; its sharp-window
    truncation error falls off only like (T W)^(-1/2) because of the
    slowly-decaying tachyonic side, so it is exercised for convergence trend
    rather than tight reconstruction.
    """
    grid = np.asarray(mass_sq_grid, dtype=float)
    if grid.ndim != 1:
        raise ContractViolation("mass_sq_grid must be one-dimensional")
    if total_length <= 0:
        raise DomainError("T must be positive")
    if grid.size < 2:
        # degenerate window: zero measure under the trapezoid convention
        return MassSuperpositionResult(0j, 0.0, 0.0, False, grid)
    window = float(grid.max() - grid.min()) / 2.0
    spacing = float(np.mean(np.diff(grid)))
    msq = mass * mass
    if mode == "euclidean":
        u = grid - msq
        values = euclidean_mass_propagator_batch(dx, msq + 1j * u, dimension)
        value = np.trapezoid(values * np.exp(1j * total_length * u), u) / (2 * np.pi)
    elif mode == "minkowski":
        values = np.array([fixed_mass_propagator(dx, m2, epsilon, dimension, damping)
                           for m2 in grid])
        integral = np.trapezoid(values * np.exp(1j * total_length * grid), grid)
        value = integral * np.exp(-1j * total_length * msq) / (2 * np.pi)
    else:
        raise ContractViolation(f"unknown mode {mode!r}")
    return MassSuperpositionResult(complex(value), window, spacing,
                                   adequate_window=window * total_length >= 4 * np.pi,
                                   mass_sq_grid=grid)


# ---------------------------------------------------------------------------
# lattice kernels (exact composition algebra)


def lattice_momentum_phase(spec: LatticeSpec, dlam: float, mass: float) -> np.ndarray:
    """Momentum-representation kernel exp(-i dlam (p.p + m^2)) on the lattice."""
    return np.exp(-1j * dlam * (spec.p_squared("minkowski") + mass * mass))


def lattice_kernel(spec: LatticeSpec, dlam: float, mass: float) -> np.ndarray:
    """Position-space kernel array K(u) with cell-volume circular convolution.

    sum_y a^D K(x - y) psi(y) reproduces the spectral evolution of psi by
    exp(-i dlam (p.p + m^2)).
    """
    phase = lattice_momentum_phase(spec, dlam, mass)
    f = ComplexField(spec, phase * (2 * np.pi) ** (-spec.dimension / 2), "momentum")
    return spectral_transform(f, "inverse").values


def lattice_propagator(spec: LatticeSpec, mass: float, epsilon: float) -> np.ndarray:
    """Regulated lattice Feynman propagator as a function of displacement.

    D(u) = (1 / prod L_mu) sum_p exp(i p.u) * (-i) / (p.p + m^2 - i epsilon),
    indexed by the lattice displacement u (periodic).
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    values = -1j / (spec.p_squared("minkowski") + mass * mass - 1j * epsilon)
    f = ComplexField(spec, values, "momentum")
    return spectral_transform(f, "inverse").values * (2 * np.pi) ** (-spec.dimension / 2)


def lattice_onshell_part(spec: LatticeSpec, mass: float, sign: int, dt: float,
                         dx_spatial) -> complex:
    """Lattice transcription of the frequency parts on the spatial sublattice.

    (1 / prod L_i) sum_{p_vec} exp(i(-sign E dt + p_vec . dx_vec)) / (2 E).
    """
    if sign not in (+1, -1):
        raise ContractViolation("sign must be +1 or -1")
    axes = [spec.momentum_axis(mu) for mu in range(1, spec.dimension)]
    mesh = np.meshgrid(*axes, indexing="ij") if axes else []
    psq = sum(p * p for p in mesh) if mesh else 0.0
    e = np.sqrt(psq + mass * mass)
    phase = -sign * e * dt
    for p, u in zip(mesh, np.atleast_1d(np.asarray(dx_spatial, dtype=float))):
        phase = phase + p * u
    vol = float(np.prod(spec.extents[1:])) if spec.dimension > 1 else 1.0
    return complex(np.sum(np.exp(1j * phase) / (2 * e)) / vol)
