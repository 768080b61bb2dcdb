"""Interaction vertices on truncated sectors and low-order scattering.

A vertex destroys a set of incoming paths and creates a set of outgoing ones
at a common spacetime point, summed over the lattice:

    V = g sum_x cellvol  prod_i psidag(x, n'_i; start)  prod_j psi(x, n_j),

and the transition operator is the exponential series
G = sum_m (-i)^m / m! V^m.  G is unitary with respect to the special adjoint
provided V is self-adjoint under it, which requires a real coupling and a
conjugate partner for any non-self-conjugate term.  On a truncated sector
these statements become matrix identities, exact per order in g wherever the
repeated application of V stays inside the sector.

The cubic A-B model couples a conserved A line to a self-conjugate B field
psi'(x, B) = psi(x, B) + psidag(x, B; start).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import factorial

import numpy as np
from scipy import integrate

from .errors import ContractViolation, LeakageError
from .fock import (
    Entry,
    FieldAlgebra,
    FockState,
    OperatorExpr,
    annihilator,
    apply_expr,
    creator_start,
    fock_inner,
    special_adjoint,
    symmetrize,
)
from .geometry import FourVector, ParticleType
from .kernel import propagator_momentum
from .onshell import MomentumGrid
from .regularization import SelfEnergyResult, angular_factor


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class VertexTerm:
    """One product psidag(n'_1)...psidag(n'_a) psi(n_1)...psi(n_b)."""

    dagger_types: tuple[str, ...]
    plain_types: tuple[str, ...]

    def generators(self, site):
        gens = [creator_start(site, n) for n in self.dagger_types]
        gens += [annihilator(site, n) for n in self.plain_types]
        return tuple(gens)

    def adjoint_signature(self) -> "VertexTerm":
        return VertexTerm(tuple(reversed(self.plain_types)),
                          tuple(reversed(self.dagger_types)))


@dataclass(frozen=True)
class InteractionModel:
    terms: tuple[VertexTerm, ...]
    coupling: float
    types: dict[str, ParticleType] = field(default_factory=dict)

    @classmethod
    def ab_model(cls, coupling: float, mass_a: float = 1.0, mass_b: float = 1.0,
                 label_a: str = "A", label_b: str = "B") -> "InteractionModel":
        """Cubic model: psidag_A psi'_B psi_A with the self-conjugate B field."""
        terms = (
            VertexTerm((label_a,), (label_b, label_a)),
            VertexTerm((label_a, label_b), (label_a,)),
        )
        types = {label_a: ParticleType(label_a, mass_a, "plain"),
                 label_b: ParticleType(label_b, mass_b, "plain")}
        return cls(terms, float(coupling), types)

    def vertex_expr(self, spec, coupling: float | None = None) -> OperatorExpr:
        """V as an operator expression, summed over lattice sites."""
        g = self.coupling if coupling is None else coupling
        w = g * spec.cell_volume
        terms = []
        for site in np.ndindex(*spec.shape):
            for term in self.terms:
                terms.append((complex(w), term.generators(site)))
        return OperatorExpr(tuple(terms))


# ---------------------------------------------------------------------------
# truncated sectors


@dataclass
class Sector:
    """Enumerated basis of start-labeled multisets with per-type count bounds.

    content maps a type label to (min_count, max_count).
    """

    algebra: FieldAlgebra
    content: dict[str, tuple[int, int]]

    def __post_init__(self):
        sites = list(np.ndindex(*self.algebra.spec.shape))
        per_type = []
        labels = sorted(self.content)
        for label in labels:
            lo, hi = self.content[label]
            options = []
            for k in range(lo, hi + 1):
                options.extend(combinations_with_replacement(sites, k))
            per_type.append((label, options))
        basis = []
        stack = [((), 0)]
        while stack:
            entries, depth = stack.pop()
            if depth == len(per_type):
                basis.append(symmetrize([Entry(s, lbl, "start") for s, lbl in entries]))
                continue
            label, options = per_type[depth]
            for combo in options:
                stack.append((entries + tuple((s, label) for s in combo), depth + 1))
        basis.sort(key=lambda st: (st.n_particles,
                                   tuple(e.sort_key() for e in st.entries)))
        self.basis = basis
        self.index = {st.entries: i for i, st in enumerate(basis)}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def state_index(self, state: FockState) -> int:
        try:
            return self.index[state.entries]
        except KeyError:
            raise ContractViolation("state is not a sector basis element") from None

    def vector(self, state: FockState) -> np.ndarray:
        v = np.zeros(self.dimension, dtype=complex)
        v[self.state_index(state)] = state.coefficient
        return v


@dataclass
class TruncatedOperator:
    """Matrix on a sector basis with leak bookkeeping.

    matrix[i, j] is the amplitude of basis state i in (op applied to basis
    state j); columns whose image had any component outside the sector are
    recorded in leaky_columns together with one offending image state.
    """

    sector: Sector
    matrix: np.ndarray
    leaky_columns: dict[int, FockState]

    def clean_columns(self, applications: int) -> np.ndarray:
        """Columns from which `applications` repeated uses never touch a leak.

        A column is dirty if it leaks itself or if any state reachable within
        applications - 1 further uses leaks (the final image states receive
        no further application).
        """
        n = self.sector.dimension
        adjacency = np.abs(self.matrix) > 0
        dirty = np.zeros(n, dtype=bool)
        for j in self.leaky_columns:
            dirty[j] = True
        for _ in range(max(applications - 1, 0)):
            dirty = dirty | (adjacency.T @ dirty)
        return ~dirty


def represent(expr: OperatorExpr, sector: Sector) -> TruncatedOperator:
    """Matrix of an operator expression on the sector basis.

    Applications run with creation headroom above the sector's own content
    bounds; image components outside the basis are recorded as leaks per
    column rather than silently dropped.
    """
    n = sector.dimension
    matrix = np.zeros((n, n), dtype=complex)
    leaks: dict[int, FockState] = {}
    alg = sector.algebra
    headroom = max((sum(1 for g in gens if g.create) for _, gens in expr.terms),
                   default=0)
    relaxed = FieldAlgebra(alg.spec, alg.types, alg.epsilon,
                           n_max=alg.n_max + headroom)
    relaxed._tables = alg._tables  # share cached propagator tables
    for j, ket in enumerate(sector.basis):
        for s in apply_expr(expr, ket, relaxed):
            idx = sector.index.get(s.entries)
            if idx is None:
                if j not in leaks:
                    leaks[j] = s
                continue
            matrix[idx, j] += s.coefficient
    return TruncatedOperator(sector, matrix, leaks)


def vertex_operator(model: InteractionModel, sector: Sector,
                    coupling: float | None = None) -> TruncatedOperator:
    """Representation of V on the sector; see is_self_adjoint for the ‡ test.

    Warns when no vertex term can act anywhere on the sector (empty operator).
    """
    expr = model.vertex_expr(sector.algebra.spec, coupling)
    rep = represent(expr, sector)
    g = model.coupling if coupling is None else coupling
    if g != 0 and not rep.leaky_columns and not np.any(rep.matrix):
        import warnings

        warnings.warn("vertex operator is empty on this sector", RuntimeWarning,
                      stacklevel=2)
    return rep


def is_self_adjoint(model: InteractionModel, sector: Sector) -> bool:
    """rep(V‡) == rep(V) on the sector (co coupling must be real)."""
    if abs(np.imag(model.coupling)) > 0:
        return False
    expr = model.vertex_expr(sector.algebra.spec)
    a = represent(expr, sector).matrix
    b = represent(special_adjoint(expr), sector).matrix
    scale = np.max(np.abs(a)) or 1.0
    return bool(np.max(np.abs(a - b)) <= 1e-12 * scale)


@dataclass
class DysonOperator:
    """g-graded truncated series G = sum_m g^m C_m, C_m = (-i)^m/m! V1^m."""

    sector: Sector
    order: int
    coefficients: dict[int, np.ndarray]          # for G
    adjoint_coefficients: dict[int, np.ndarray]  # for G‡
    clean: np.ndarray           # columns surviving `order` applications
    residual_clean: np.ndarray  # columns surviving 2*order (for G‡G checks)

    def matrix(self, g: float) -> np.ndarray:
        total = np.zeros_like(self.coefficients[0])
        for m, c in self.coefficients.items():
            total += g ** m * c
        return total

    def adjoint_matrix(self, g: float) -> np.ndarray:
        total = np.zeros_like(self.adjoint_coefficients[0])
        for m, c in self.adjoint_coefficients.items():
            total += g ** m * c
        return total

    def unitarity_residual_orders(self) -> dict[int, np.ndarray]:
        """Order-by-order coefficients of G‡G - 1 (restricted to all columns)."""
        out = {}
        for k in range(0, 2 * self.order + 1):
            total = np.zeros_like(self.coefficients[0])
            for a in range(0, k + 1):
                b = k - a
                if a <= self.order and b <= self.order:
                    total += self.adjoint_coefficients[a] @ self.coefficients[b]
            if k == 0:
                total -= np.eye(self.sector.dimension)
            out[k] = total
        return out

    def unitarity_residual_norm(self, g: float) -> float:
        """|| (G‡G - 1) restricted to 2*order-leakage-free columns ||."""
        r = self.adjoint_matrix(g) @ self.matrix(g) - np.eye(self.sector.dimension)
        return float(np.linalg.norm(r[:, self.residual_clean]))


def dyson_truncated(model: InteractionModel, sector: Sector, order: int) -> DysonOperator:
    """Truncated exponential series of the vertex with per-order bookkeeping.

    Demands a leakage-free core: at least one basis column must survive
    2*order applications of V without touching a leaking state, else a
    LeakageError names the first escaping basis state.
    """
    if order < 0:
        raise ContractViolation("order must be >= 0")
    expr = model.vertex_expr(sector.algebra.spec, coupling=1.0)
    v1 = represent(expr, sector)
    a1 = represent(special_adjoint(expr), sector)
    n = sector.dimension
    coeffs = {0: np.eye(n, dtype=complex)}
    adj_coeffs = {0: np.eye(n, dtype=complex)}
    power = np.eye(n, dtype=complex)
    adj_power = np.eye(n, dtype=complex)
    for m in range(1, order + 1):
        power = v1.matrix @ power
        adj_power = a1.matrix @ adj_power
        coeffs[m] = (-1j) ** m / factorial(m) * power
        adj_coeffs[m] = (1j) ** m / factorial(m) * adj_power
    clean = v1.clean_columns(order)
    if order > 0 and not clean.any():
        j, state = next(iter(v1.leaky_columns.items()))
        raise LeakageError(
            f"V^{order} escapes the sector from every basis state; first leak "
            f"from column {j} into {state.entries}", basis_state=state)
    residual_clean = v1.clean_columns(2 * order)
    return DysonOperator(sector, order, coeffs, adj_coeffs, clean, residual_clean)


def amplitude_order_m(in_state: FockState, out_state: FockState,
                      model: InteractionModel, m_order: int, sector: Sector,
                      max_order: int = 3) -> complex:
    """<out| (-i)^m / m! V^m |in> by repeated application on the sector.

    Order 0 reduces to the bare multiparticle pairing.
    """
    if m_order < 0 or m_order > max_order:
        raise ContractViolation(f"m_order must be in [0, {max_order}]")
    alg = sector.algebra
    expr = model.vertex_expr(alg.spec)
    states = [in_state]
    for _ in range(m_order):
        next_states = []
        for s in states:
            next_states.extend(apply_expr(expr, s, alg))
        states = next_states
    total = 0j
    for s in states:
        total += fock_inner(out_state, s, alg)
    return complex((-1j) ** m_order / factorial(m_order) * total)


# ---------------------------------------------------------------------------
# external lines and tree-level scattering


FINAL_PARTICLE = "final-particle"
FINAL_ANTIPARTICLE = "final-antiparticle"
INITIAL_PARTICLE = "initial-particle"
INITIAL_ANTIPARTICLE = "initial-antiparticle"
_LINE_KINDS = (FINAL_PARTICLE, FINAL_ANTIPARTICLE, INITIAL_PARTICLE, INITIAL_ANTIPARTICLE)


def external_line_factor(kind: str, p_spatial, mass: float, x: FourVector,
                         dimension: int) -> complex:
    """On-shell reduction factor for one external line at vertex position x.

    (2 pi)^(-d/2) (2 E_p)^(-1/2) exp(i phi) with
    phi = +E x0 - p.x  (final particle, outgoing),
          -E x0 + p.x  (final antiparticle: incoming, path running backward),
          -E x0 + p.x  (initial particle, incoming),
          +E x0 - p.x  (initial antiparticle, outgoing).
    """
    if kind not in _LINE_KINDS:
        raise ContractViolation(f"unknown line kind {kind!r}")
    p = np.atleast_1d(np.asarray(p_spatial, dtype=float))
    d = dimension - 1
    if p.size != d:
        raise ContractViolation("spatial momentum does not match the dimension")
    e = float(np.sqrt(p @ p + mass * mass))
    x_arr = x.as_array()
    pdotx = float(p @ x_arr[1:])
    if kind in (FINAL_PARTICLE, INITIAL_ANTIPARTICLE):
        phi = +e * x_arr[0] - pdotx
    else:
        phi = -e * x_arr[0] + pdotx
    return complex((2 * np.pi) ** (-d / 2) * (2 * e) ** (-0.5) * np.exp(1j * phi))


@dataclass(frozen=True)
class ScatterLeg:
    p_spatial: tuple[float, ...]
    type_label: str
    sign: int = +1  # +1 particle, -1 antiparticle

    def __post_init__(self):
        object.__setattr__(self, "p_spatial",
                           tuple(float(p) for p in self.p_spatial))
        if self.sign not in (+1, -1):
            raise ContractViolation("sign must be +1 or -1")


@dataclass(frozen=True)
class ScatterSpec:
    incoming: tuple[ScatterLeg, ...]
    outgoing: tuple[ScatterLeg, ...]
    grid: MomentumGrid

    def __post_init__(self):
        axis = self.grid.axis()
        for leg in self.incoming + self.outgoing:
            for p in leg.p_spatial:
                if np.min(np.abs(axis - p)) > 1e-9 * max(1.0, self.grid.spacing):
                    raise ContractViolation(f"momentum component {p} is off the grid")


def scatter_tree_2to2(spec: ScatterSpec, model: InteractionModel,
                      epsilon: float) -> complex:
    """Tree-level A A -> A A amplitude via B exchange.

    g^2 [prop_B(p1 - p1') + prop_B(p1 - p2')] times the four external-line
    magnitude factors and the grid-Kronecker conservation delta; both
    crossing assignments of the final momenta are included.
    """
    if len(spec.incoming) != 2 or len(spec.outgoing) != 2:
        raise ContractViolation("tree amplitude needs 2 incoming and 2 outgoing legs")
    label_a = spec.incoming[0].type_label
    if any(leg.type_label != label_a for leg in spec.incoming + spec.outgoing):
        raise ContractViolation("all external legs must be the conserved-line type")
    labels = set(model.types) - {label_a}
    if len(labels) != 1:
        raise ContractViolation("model must carry exactly one exchange type")
    label_b = labels.pop()
    m_a = model.types[label_a].mass
    m_b = model.types[label_b].mass
    d = spec.grid.spatial_dimension

    p_in = [np.asarray(leg.p_spatial) for leg in spec.incoming]
    p_out = [np.asarray(leg.p_spatial) for leg in spec.outgoing]
    if not np.allclose(sum(p_in), sum(p_out), rtol=0.0, atol=1e-12):
        return 0j  # grid Kronecker delta

    def onshell(p):
        return float(np.sqrt(p @ p + m_a * m_a))

    def transfer(pa, pb):
        return FourVector((onshell(pa) - onshell(pb),) + tuple(pa - pb))

    exchange = (propagator_momentum(transfer(p_in[0], p_out[0]), m_b, epsilon)
                + propagator_momentum(transfer(p_in[0], p_out[1]), m_b, epsilon))
    external = 1.0
    for p in p_in + p_out:
        e = onshell(p)
        external *= (2 * np.pi) ** (-d / 2) * (2 * e) ** (-0.5)
    return complex(model.coupling ** 2 * exchange * external)


# ---------------------------------------------------------------------------
# one-loop self-energy (unregulated, euclidean)


def self_energy_unregulated(p: FourVector, m_a: float, m_b: float, dimension: int,
                            cutoff: float) -> SelfEnergyResult:
    """Euclidean bubble I(p; cutoff) = Int_{|k|<cutoff} d^Dk
    [(k^2+m_a^2)((p-k)^2+m_b^2)]^(-1) by radial quadrature with the angular
    integral in closed form.  Convergent as cutoff -> inf in D=2; grows like
    log(cutoff) in D=4.
    """
    if dimension not in (2, 4):
        raise ContractViolation("dimension must be 2 or 4")
    if not cutoff > 10 * max(m_a, m_b):
        raise ContractViolation("cutoff must exceed 10 * max(m_a, m_b)")
    p_norm = float(np.sqrt(p.as_array() @ p.as_array()))

    def radial(k):
        ksq = k * k
        meas = k if dimension == 2 else k ** 3
        return meas / (ksq + m_a * m_a) * angular_factor(ksq, p_norm, m_b, k, dimension)

    breakpoints = sorted({m_a, m_b, p_norm + m_b}) if np.isfinite(cutoff) else None
    value, err = integrate.quad(radial, 0.0, cutoff, limit=400,
                                points=breakpoints if (breakpoints and np.isfinite(cutoff)) else None)
    return SelfEnergyResult(value=complex(value), error=float(err), route="cutoff",
                            metadata={"cutoff": cutoff, "dimension": dimension,
                                      "m_a": m_a, "m_b": m_b, "p_norm": p_norm})
