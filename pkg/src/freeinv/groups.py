"""Finite groups, unitary representations, and the induced action on
homogeneous free polynomials.

The degree-n action applies pi(g) to every tensor factor of the coefficient
vector (letter-by-letter substitution), so it is realized with n mode
products instead of a d^n x d^n matrix.  Averaging that action over the
group gives the orthogonal projection onto invariant polynomials.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .freepoly import FreePoly, HomogeneousSlice

# Construction fails loudly past these rather than proceeding with a
# near-group or near-representation; downstream code assumes exactness.
GROUP_TOL = 1e-10
REP_TOL = 1e-10

_ASSOC_FULL_CHECK_MAX = 64
_ASSOC_SAMPLES = 200_000


class GroupError(ValueError):
    """The supplied data is not a group or not a unitary representation."""


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table of element indices."""

    mult: np.ndarray
    identity: int
    inverse: np.ndarray

    @property
    def order(self) -> int:
        return self.mult.shape[0]

    def elements(self) -> range:
        return range(self.order)

    @classmethod
    def from_table(cls, mult: Sequence[Sequence[int]]) -> FiniteGroup:
        table = np.asarray(mult, dtype=int)
        n = table.shape[0]
        if table.shape != (n, n) or n < 1:
            raise GroupError(f"multiplication table must be square, got {table.shape}")
        if table.min() < 0 or table.max() >= n:
            raise GroupError("table entries must be element indices in [0, order)")
        identity = None
        for e in range(n):
            if np.array_equal(table[e], np.arange(n)) and np.array_equal(
                table[:, e], np.arange(n)
            ):
                identity = e
                break
        if identity is None:
            raise GroupError("table has no identity element")
        inverse = np.full(n, -1, dtype=int)
        for a in range(n):
            hits = np.nonzero(table[a] == identity)[0]
            if len(hits) != 1 or table[hits[0], a] != identity:
                raise GroupError(f"element {a} has no two-sided inverse")
            inverse[a] = hits[0]
        _check_associativity(table)
        return cls(mult=table, identity=identity, inverse=inverse)

    def conjugacy_classes(self) -> list[list[int]]:
        """Disjoint conjugacy classes covering the group; each class is
        sorted and classes are ordered by smallest member (identity first)."""
        n = self.order
        seen = np.zeros(n, dtype=bool)
        classes = []
        for x in range(n):
            if seen[x]:
                continue
            orbit = {int(self.mult[self.mult[g, x], self.inverse[g]]) for g in range(n)}
            for y in orbit:
                seen[y] = True
            classes.append(sorted(orbit))
        classes.sort(key=lambda cls_: cls_[0])
        return classes


def _check_associativity(table: np.ndarray) -> None:
    n = table.shape[0]
    if n <= _ASSOC_FULL_CHECK_MAX:
        left = table[table, :]  # left[a,b,c] = table[table[a,b], c]
        right = table[:, table]  # right[a,b,c] = table[a, table[b,c]]
        if not np.array_equal(left, right):
            raise GroupError("multiplication table is not associative")
        return
    rng = np.random.default_rng(0)
    a = rng.integers(0, n, _ASSOC_SAMPLES)
    b = rng.integers(0, n, _ASSOC_SAMPLES)
    c = rng.integers(0, n, _ASSOC_SAMPLES)
    if not np.array_equal(table[table[a, b], c], table[a, table[b, c]]):
        raise GroupError("multiplication table is not associative (sampled check)")


# -- builders ----------------------------------------------------------------
#
# The permutation-backed builders also return the element permutations
# (0-based image tuples) so the natural permutation representation can be
# attached without recomputing anything.


def _compose(p: tuple, q: tuple) -> tuple:
    # (p o q)(i) = p(q(i)); matches matrix products of the permutation rep.
    return tuple(p[q[i]] for i in range(len(p)))


def _group_from_perms(perms: list[tuple]) -> FiniteGroup:
    index = {perm: i for i, perm in enumerate(perms)}
    n = len(perms)
    mult = np.empty((n, n), dtype=int)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            composed = _compose(p, q)
            if composed not in index:
                raise GroupError("permutation set is not closed under composition")
            mult[i, j] = index[composed]
    return FiniteGroup.from_table(mult)


def symmetric_group(n_letters: int) -> tuple[FiniteGroup, list[tuple]]:
    """All permutations of n letters, ordered lexicographically by image."""
    if n_letters < 1:
        raise GroupError(f"symmetric group needs n >= 1, got {n_letters}")
    perms = sorted(itertools.permutations(range(n_letters)))
    return _group_from_perms(perms), perms


def cyclic_group(n: int) -> tuple[FiniteGroup, list[tuple]]:
    """Cyclic shifts of n letters (the regular permutation picture)."""
    if n < 1:
        raise GroupError(f"cyclic group needs n >= 1, got {n}")
    perms = [tuple((i + k) % n for i in range(n)) for k in range(n)]
    return _group_from_perms(perms), perms


def dihedral_group(n: int) -> tuple[FiniteGroup, list[tuple]]:
    """Symmetries of the regular n-gon permuting its n vertices (order 2n)."""
    if n < 3:
        raise GroupError(f"dihedral group needs n >= 3, got {n}")
    rotations = [tuple((i + k) % n for i in range(n)) for k in range(n)]
    reflections = [tuple((k - i) % n for i in range(n)) for k in range(n)]
    perms = rotations + reflections
    return _group_from_perms(perms), perms


def trivial_group() -> FiniteGroup:
    return FiniteGroup.from_table([[0]])


def make_group(kind: str, **params) -> tuple[FiniteGroup, list | None]:
    """Build a group by kind name; returns the element permutations as well
    for the permutation-backed kinds (None for explicit tables)."""
    if kind == "symmetric":
        return symmetric_group(int(params["n"]))
    if kind == "cyclic":
        return cyclic_group(int(params["n"]))
    if kind == "dihedral":
        return dihedral_group(int(params["n"]))
    if kind == "trivial":
        return trivial_group(), None
    if kind == "table":
        return FiniteGroup.from_table(params["mult"]), None
    raise GroupError(
        f"unknown group kind {kind!r}; use symmetric, cyclic, dihedral, trivial, or table"
    )


# -- representations ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UnitaryRep:
    """A unitary matrix pi(g) per group element, verified on construction."""

    group: FiniteGroup
    matrices: np.ndarray  # shape (|G|, dim, dim), complex

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=complex)
        object.__setattr__(self, "matrices", mats)
        n = self.group.order
        if mats.ndim != 3 or mats.shape[0] != n or mats.shape[1] != mats.shape[2]:
            raise GroupError(f"need one square matrix per element, got shape {mats.shape}")
        d = mats.shape[1]
        eye = np.eye(d)
        if np.max(np.abs(mats[self.group.identity] - eye)) > REP_TOL:
            raise GroupError("pi(identity) is not the identity matrix")
        for g in range(n):
            if np.max(np.abs(mats[g] @ mats[g].conj().T - eye)) > REP_TOL:
                raise GroupError(f"pi(g) is not unitary for element {g}")
        for g in range(n):
            for h in range(n):
                gh = self.group.mult[g, h]
                if np.max(np.abs(mats[g] @ mats[h] - mats[gh])) > REP_TOL:
                    raise GroupError(
                        f"pi is not a homomorphism: pi({g})pi({h}) != pi({gh})"
                    )

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @classmethod
    def from_permutations(cls, group: FiniteGroup, perms: Sequence[tuple]) -> UnitaryRep:
        """Permutation matrices sending e_i to e_{g(i)}."""
        if len(perms) != group.order:
            raise GroupError("need one permutation per group element")
        dim = len(perms[0])
        mats = np.zeros((group.order, dim, dim), dtype=complex)
        for g, perm in enumerate(perms):
            if sorted(perm) != list(range(dim)):
                raise GroupError(f"element {g}: not a permutation of 0..{dim - 1}")
            for i in range(dim):
                mats[g, perm[i], i] = 1.0
        return cls(group=group, matrices=mats)

    @classmethod
    def from_diagonals(cls, group: FiniteGroup, diagonals: Sequence[Sequence[complex]]) -> UnitaryRep:
        """Diagonal representation from per-element eigenvalue lists."""
        if len(diagonals) != group.order:
            raise GroupError("need one diagonal per group element")
        mats = np.stack([np.diag(np.asarray(diag, dtype=complex)) for diag in diagonals])
        return cls(group=group, matrices=mats)

    @classmethod
    def from_matrices(cls, group: FiniteGroup, matrices: Sequence[np.ndarray]) -> UnitaryRep:
        return cls(group=group, matrices=np.stack([np.asarray(m, dtype=complex) for m in matrices]))

    # -- action on polynomials -------------------------------------------

    def act_slice(self, g: int, slc: HomogeneousSlice) -> HomogeneousSlice:
        """Apply the degree-n action of element g to a homogeneous slice."""
        if slc.alphabet_size != self.dim:
            raise GroupError(
                f"slice alphabet {slc.alphabet_size} does not match rep dim {self.dim}"
            )
        coeffs = _apply_tensor_power(self.matrices[g], slc.coeffs, self.dim, slc.degree)
        return HomogeneousSlice(slc.alphabet_size, slc.degree, coeffs)

    def act_poly(self, g: int, p: FreePoly) -> FreePoly:
        if p.alphabet_size != self.dim:
            raise GroupError(
                f"polynomial alphabet {p.alphabet_size} does not match rep dim {self.dim}"
            )
        out = FreePoly.zero(self.dim)
        for n in p.component_degrees():
            out = out + self.act_slice(g, p.homogeneous_component(n)).to_poly()
        return out

    def reynolds(self, p: FreePoly) -> FreePoly:
        """Group average of p; the orthogonal projection onto invariants."""
        if p.alphabet_size != self.dim:
            raise GroupError(
                f"polynomial alphabet {p.alphabet_size} does not match rep dim {self.dim}"
            )
        out = FreePoly.zero(self.dim)
        for n in p.component_degrees():
            coeffs = p.homogeneous_component(n).coeffs
            avg = np.zeros_like(coeffs)
            for g in self.group.elements():
                avg += _apply_tensor_power(self.matrices[g], coeffs, self.dim, n)
            avg /= self.group.order
            out = out + HomogeneousSlice(self.dim, n, avg).to_poly()
        return out

    def is_invariant(self, p: FreePoly, tol: float = 1e-9) -> bool:
        if tol <= 0:
            raise ValueError(f"tol must be positive, got {tol}")
        return (self.reynolds(p) - p).norm() <= tol * max(1.0, p.norm())

    def is_abelian_action(self, tol: float = REP_TOL) -> bool:
        """True when all pi(g) commute, so they diagonalize simultaneously."""
        mats = self.matrices
        for g in range(len(mats)):
            for h in range(g + 1, len(mats)):
                if np.max(np.abs(mats[g] @ mats[h] - mats[h] @ mats[g])) > tol:
                    return False
        return True

    def character(self) -> Character:
        return Character.from_rep(self)

    def invariant_dimension(self, degree: int) -> int:
        """Numerical rank of the group-averaging projector on the degree-n
        coefficient space (eigenvalue threshold 0.5)."""
        d = self.dim
        size = d**degree
        stack = np.eye(size, dtype=complex)
        avg = np.zeros((size, size), dtype=complex)
        for g in self.group.elements():
            avg += _apply_tensor_power(self.matrices[g], stack, d, degree)
        avg /= self.group.order
        eigvals = np.linalg.eigvalsh((avg + avg.conj().T) / 2)
        return int(np.sum(eigvals >= 0.5))


def _apply_tensor_power(mat: np.ndarray, coeffs: np.ndarray, d: int, degree: int) -> np.ndarray:
    """Apply mat to each of the `degree` tensor axes of the coefficient
    vector(s); trailing axes of `coeffs` are carried along unchanged."""
    if degree == 0:
        return coeffs.copy()
    lead = (d,) * degree
    tail = coeffs.shape[1:]
    t = coeffs.reshape(lead + tail)
    for axis in range(degree):
        t = np.moveaxis(np.tensordot(mat, t, axes=(1, axis)), 0, axis)
    return t.reshape((d**degree,) + tail)


@dataclass(frozen=True)
class Character:
    """Trace of a representation, constant on conjugacy classes."""

    values: tuple  # complex trace per class
    class_sizes: tuple
    class_reps: tuple
    group_order: int
    classes: tuple = field(repr=False, default=())

    @classmethod
    def from_rep(cls, rep: UnitaryRep) -> Character:
        classes = rep.group.conjugacy_classes()
        traces = np.einsum("gii->g", rep.matrices)
        values = []
        for members in classes:
            rep_trace = traces[members[0]]
            spread = max(abs(traces[m] - rep_trace) for m in members)
            if spread > REP_TOL:
                raise GroupError(
                    f"trace is not constant on the conjugacy class of {members[0]}"
                )
            values.append(complex(rep_trace))
        sizes = tuple(len(members) for members in classes)
        if sum(sizes) != rep.group.order:
            raise GroupError("conjugacy classes do not partition the group")
        return cls(
            values=tuple(values),
            class_sizes=sizes,
            class_reps=tuple(members[0] for members in classes),
            group_order=rep.group.order,
            classes=tuple(tuple(members) for members in classes),
        )
