"""Symmetrized multiparticle states, permanents, fields, and the special adjoint.

States and operators live on truncated sectors over a finite spacetime
lattice, which turns the formal operator algebra into checkable matrix and
number identities.  Positions are lattice site index tuples; each entry of a
state carries a particle type and a tag: "start" entries are created at the
reference parameter value (kets), "integrated" entries have their endpoint
parameter integrated over (bras).

The multiparticle pairing of an integrated-label bra against a start-label
ket is a permanent over the two-point matrix with type-matching deltas:

    <x'_1 ... x'_N | x_1 ... x_N> = sum_perms prod_i delta(n'_i, n_i)
                                    D(x'_perm(i) - x_i; m_i)

where D is the regulated lattice propagator for plain types, its
positive-frequency part for normal on-shell types, and the argument-reversed
negative-frequency part for antiparticle types.

The special adjoint (denoted ‡ in the docstrings) swaps integrated-endpoint
annihilators with start-of-path creators: psi(x,n) <-> psidag(x,n;start) and
psi(x,n;start) <-> psidag(x,n), reverses products, and conjugates
coefficients.  It is an involution, and the vertex operators of the
interaction module must be self-adjoint under it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import ContractViolation, SectorOverflowError
from .geometry import ParticleType
from .kernel import lattice_onshell_part, lattice_propagator
from .lattice import LatticeSpec

START = "start"
INTEGRATED = "integrated"


@dataclass(frozen=True)
class Entry:
    site: tuple[int, ...]
    type_label: str
    tag: str = START

    def __post_init__(self):
        if self.tag not in (START, INTEGRATED):
            raise ContractViolation(f"unknown tag {self.tag!r}")
        object.__setattr__(self, "site", tuple(int(i) for i in self.site))

    def sort_key(self):
        return (self.type_label, self.tag, self.site)


@dataclass(frozen=True)
class FockState:
    """Canonical (sorted) multiset of entries with a complex coefficient.

    The sorted form represents the Bose-symmetrized product state; the
    (N!)^(-1/2) symmetrization bookkeeping is carried by the permanent
    pairing, which supplies every permutation term (and hence the boson
    multiplicity factors for repeated entries).
    """

    coefficient: complex
    entries: tuple[Entry, ...]

    @property
    def n_particles(self) -> int:
        return len(self.entries)

    def key(self):
        return self.entries

    def scaled(self, c: complex) -> "FockState":
        return FockState(self.coefficient * c, self.entries)


def symmetrize(entries, coefficient: complex = 1.0, n_max: int | None = None) -> FockState:
    """Canonical symmetrized state from an entry sequence."""
    entries = tuple(sorted(entries, key=Entry.sort_key))
    if n_max is not None and len(entries) > n_max:
        raise SectorOverflowError(
            f"state with {len(entries)} entries exceeds sector bound {n_max}")
    return FockState(complex(coefficient), entries)


VACUUM = FockState(1.0 + 0j, ())


# ---------------------------------------------------------------------------
# permanents


def permanent_naive(matrix: np.ndarray) -> complex:
    """Direct permutation-sum permanent; exact reference for small n."""
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ContractViolation("permanent needs a square matrix")
    if n == 0:
        return 1.0 + 0j
    total = 0j
    rows = range(n)
    for cols in permutations(rows):
        term = 1.0 + 0j
        for i in rows:
            term *= matrix[i, cols[i]]
        total += term
    return total


def permanent_ryser(matrix: np.ndarray) -> complex:
    """Ryser permanent with Gray-code subset updates, O(2^n n)."""
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ContractViolation("permanent needs a square matrix")
    if n == 0:
        return 1.0 + 0j
    if n > 16:
        raise ContractViolation("Ryser evaluation limited to n <= 16")
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    gray = 0
    for k in range(1, 2 ** n):
        new_gray = k ^ (k >> 1)
        changed = gray ^ new_gray
        j = changed.bit_length() - 1
        if new_gray & changed:
            row_sums += matrix[:, j]
        else:
            row_sums -= matrix[:, j]
        gray = new_gray
        # accumulate (-1)^(n-|S|) prod_i rowsum_i(S)
        subset_sign = 1.0 if (bin(gray).count("1") % 2) == (n % 2) else -1.0
        total += subset_sign * np.prod(row_sums)
    return complex(total)


def permanent(matrix: np.ndarray) -> complex:
    matrix = np.asarray(matrix)
    return permanent_naive(matrix) if matrix.shape[0] <= 4 else permanent_ryser(matrix)


# ---------------------------------------------------------------------------
# field algebra on a lattice


class FieldAlgebra:
    """Two-point pairings and field application rules on a fixed lattice.

    types maps a label to a ParticleType whose conjugate flag selects the
    pairing: "plain" -> regulated lattice propagator, "normal" ->
    positive-frequency part, "anti" -> negative-frequency part with reversed
    arguments.
    """

    def __init__(self, spec: LatticeSpec, types: dict[str, ParticleType],
                 epsilon: float = 1e-2, n_max: int = 8):
        self.spec = spec
        self.types = dict(types)
        self.epsilon = float(epsilon)
        self.n_max = int(n_max)
        self._tables: dict[str, np.ndarray] = {}

    def _plain_table(self, label: str) -> np.ndarray:
        if label not in self._tables:
            self._tables[label] = lattice_propagator(
                self.spec, self.types[label].mass, self.epsilon)
        return self._tables[label]

    def two_point(self, label: str, bra_site, ket_site) -> complex:
        """Pairing of an integrated-label bra at bra_site with a start ket."""
        kind = self.types[label].conjugate
        mass = self.types[label].mass
        bra_site = tuple(bra_site)
        ket_site = tuple(ket_site)
        if kind == "plain":
            diff = tuple((b - k) % n for b, k, n in
                         zip(bra_site, ket_site, self.spec.shape))
            return complex(self._plain_table(label)[diff])
        a = self.spec.spacings
        dt = (bra_site[0] - ket_site[0]) * a[0]
        dxs = [(b - k) * ai for b, k, ai in zip(bra_site[1:], ket_site[1:], a[1:])]
        if kind == "normal":
            return lattice_onshell_part(self.spec, mass, +1, dt, dxs)
        # antiparticle: reversed arguments, D-(x_ket - x_bra)
        return lattice_onshell_part(self.spec, mass, -1, -dt, [-u for u in dxs])

    def check_label(self, label: str):
        if label not in self.types:
            raise ContractViolation(f"unknown particle type {label!r}")


# ---------------------------------------------------------------------------
# operator expressions and the special adjoint


@dataclass(frozen=True)
class Generator:
    """One field factor: creation/annihilation at a site, start or integrated."""

    create: bool
    start: bool
    site: tuple[int, ...]
    type_label: str

    def __post_init__(self):
        object.__setattr__(self, "site", tuple(int(i) for i in self.site))

    def adjoint(self) -> "Generator":
        # psi(x,n) <-> psidag(x,n;start), psi(x,n;start) <-> psidag(x,n)
        return Generator(not self.create, not self.start, self.site, self.type_label)


def annihilator(site, label: str) -> Generator:
    """psi(x,n): endpoint-integrated annihilation field."""
    return Generator(False, False, site, label)


def creator_start(site, label: str) -> Generator:
    """psidag(x,n;start): creation at the reference parameter value."""
    return Generator(True, True, site, label)


@dataclass(frozen=True)
class OperatorExpr:
    """Sum of coefficient-weighted ordered generator strings."""

    terms: tuple[tuple[complex, tuple[Generator, ...]], ...]

    @classmethod
    def from_string(cls, coefficient: complex, generators) -> "OperatorExpr":
        return cls(((complex(coefficient), tuple(generators)),))

    def __add__(self, other: "OperatorExpr") -> "OperatorExpr":
        return OperatorExpr(self.terms + other.terms)

    def scaled(self, c: complex) -> "OperatorExpr":
        return OperatorExpr(tuple((coeff * c, gens) for coeff, gens in self.terms))


def special_adjoint(expr: OperatorExpr) -> OperatorExpr:
    """(c AB...Z)‡ = conj(c) Z‡...B‡A‡ with the generator swap of the header."""
    out = []
    for coeff, gens in expr.terms:
        out.append((np.conj(coeff), tuple(g.adjoint() for g in reversed(gens))))
    return OperatorExpr(tuple(out))


# ---------------------------------------------------------------------------
# field application


def apply_generator(gen: Generator, state: FockState, algebra: FieldAlgebra) -> list[FockState]:
    """Apply one field factor to a state; returns the resulting combination.

    Creation appends an entry with the generator's tag.  The
    endpoint-integrated annihilator psi(x,n) contracts against each start
    entry of matching type with the two-point pairing; the start annihilator
    psi(x,n;start) contracts against start entries with the equal-parameter
    lattice delta.  Contractions against integrated entries are not a
    meaningful pairing (the position states are not orthogonal) and are
    rejected.
    """
    algebra.check_label(gen.type_label)
    if gen.create:
        tag = START if gen.start else INTEGRATED
        if state.n_particles + 1 > algebra.n_max:
            raise SectorOverflowError(
                f"creation would exceed the sector bound {algebra.n_max}")
        return [symmetrize(state.entries + (Entry(gen.site, gen.type_label, tag),),
                           state.coefficient)]
    out = []
    for i, entry in enumerate(state.entries):
        if entry.type_label != gen.type_label:
            continue
        if entry.tag != START:
            raise ContractViolation(
                "contraction against an integrated-label entry is not defined")
        if gen.start:
            # equal-parameter pairing: lattice delta
            if entry.site == gen.site:
                factor = 1.0 / algebra.spec.cell_volume
            else:
                continue
        else:
            factor = algebra.two_point(gen.type_label, gen.site, entry.site)
        rest = state.entries[:i] + state.entries[i + 1:]
        out.append(symmetrize(rest, state.coefficient * factor))
    return out


def apply_string(generators, state: FockState, algebra: FieldAlgebra) -> list[FockState]:
    """Apply an ordered generator string (rightmost factor first)."""
    states = [state]
    for gen in reversed(tuple(generators)):
        next_states = []
        for s in states:
            next_states.extend(apply_generator(gen, s, algebra))
        states = next_states
    return states


def apply_expr(expr: OperatorExpr, state: FockState, algebra: FieldAlgebra) -> list[FockState]:
    out = []
    for coeff, gens in expr.terms:
        for s in apply_string(gens, state.scaled(coeff), algebra):
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# inner products and commutators


def dual_state(state: FockState) -> FockState:
    """The integrated-label bra functional dual to a start-label ket.

    This is a transpose-type duality: the label tags flip and the pairing is
    bilinear, with no coefficient conjugation.  The scalar rule of the
    special adjoint, (cA)‡ = c* A‡, is a property of the operator algebra
    itself; the pairing adjoint coincides with ‡ on real-coefficient strings
    (the two-point functions are even on the lattice, which is what makes
    the transpose close on the generator swap).
    """
    entries = tuple(Entry(e.site, e.type_label, INTEGRATED) for e in state.entries)
    return symmetrize(entries, state.coefficient)


def fock_inner(bra: FockState, ket: FockState, algebra: FieldAlgebra) -> complex:
    """Permanent-structured pairing of an integrated bra with a start ket.

    Bras are linear functionals, so the pairing is bilinear in the stored
    coefficients; conjugation happens in dual_state when a ket is dualized.
    """
    if any(e.tag != INTEGRATED for e in bra.entries):
        raise ContractViolation("bra entries must carry integrated labels")
    if any(e.tag != START for e in ket.entries):
        raise ContractViolation("ket entries must carry start labels")
    if bra.n_particles != ket.n_particles:
        return 0j
    n = bra.n_particles
    if n == 0:
        return complex(bra.coefficient * ket.coefficient)
    matrix = np.zeros((n, n), dtype=complex)
    for i, be in enumerate(bra.entries):
        for j, ke in enumerate(ket.entries):
            if be.type_label == ke.type_label:
                matrix[i, j] = algebra.two_point(be.type_label, be.site, ke.site)
    return complex(bra.coefficient * ket.coefficient * permanent(matrix))


def pair_states(bra_states, ket_states, algebra: FieldAlgebra) -> complex:
    total = 0j
    for b in bra_states:
        for k in ket_states:
            total += fock_inner(b, k, algebra)
    return total


def commutator_value(bra_site, bra_label: str, ket_site, ket_label: str,
                     algebra: FieldAlgebra) -> complex:
    """[psi(x', n'), psi‡(x, n)] evaluated on the vacuum and projected back.

    Exercises the application machinery: the annihilator-first ordering kills
    the vacuum, so the commutator equals the vacuum coefficient of
    psi(x', n') psidag(x, n; start) |0>.
    """
    created = apply_generator(creator_start(ket_site, ket_label), VACUUM, algebra)
    value = 0j
    for s in created:
        for out in apply_generator(annihilator(bra_site, bra_label), s, algebra):
            if out.n_particles == 0:
                value += out.coefficient
    return value
