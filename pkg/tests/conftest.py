"""Shared fixtures: the built-in group representations and cached bases."""

from __future__ import annotations

import numpy as np
import pytest

import freeinv as fi


def make_rep(name: str) -> fi.UnitaryRep:
    if name == "sym2":
        group, perms = fi.symmetric_group(2)
        return fi.UnitaryRep.from_permutations(group, perms)
    if name == "sym3":
        group, perms = fi.symmetric_group(3)
        return fi.UnitaryRep.from_permutations(group, perms)
    if name == "cyclic3":
        group, perms = fi.cyclic_group(3)
        return fi.UnitaryRep.from_permutations(group, perms)
    if name == "dihedral4":
        group, perms = fi.dihedral_group(4)
        return fi.UnitaryRep.from_permutations(group, perms)
    if name == "even2":
        group, _ = fi.cyclic_group(2)
        return fi.UnitaryRep.from_diagonals(group, [[1, 1], [-1, -1]])
    if name == "trivial2":
        return fi.UnitaryRep.from_matrices(fi.trivial_group(), [np.eye(2)])
    raise ValueError(name)


BUILTIN_NAMES = ("sym2", "sym3", "even2", "cyclic3", "dihedral4")


@pytest.fixture(scope="session")
def reps() -> dict:
    return {name: make_rep(name) for name in BUILTIN_NAMES + ("trivial2",)}


@pytest.fixture(scope="session")
def bases6(reps) -> dict:
    """General-construction bases through degree 6 for all built-in groups."""
    return {name: fi.build_general(reps[name], 6) for name in BUILTIN_NAMES}


def random_poly(rng: np.random.Generator, d: int, max_degree: int, n_terms: int = 8) -> fi.FreePoly:
    terms = {}
    for _ in range(n_terms):
        degree = int(rng.integers(0, max_degree + 1))
        word = tuple(int(k) for k in rng.integers(1, d + 1, size=degree))
        terms[word] = complex(rng.standard_normal(), rng.standard_normal())
    return fi.FreePoly(d, terms)


def random_invariant(rng, rep: fi.UnitaryRep, max_degree: int, n_terms: int = 8) -> fi.FreePoly:
    """Reynolds projection of a random polynomial, resampled until nonzero."""
    for _ in range(50):
        p = rep.reynolds(random_poly(rng, rep.dim, max_degree, n_terms))
        if not p.is_zero():
            return p
    raise AssertionError("could not sample a nonzero invariant")
