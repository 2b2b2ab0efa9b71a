"""Factor invariant polynomials through the basis generators.

Distinct products of superorthogonal generators are orthonormal, so the
coefficient of a generator word in an invariant polynomial is a single inner
product, and the factored form is unique.  `rewrite` produces that factored
polynomial over the generator alphabet; `expand` substitutes the generators
back and is its two-sided inverse on invariant input.

Products of generators never mix coefficients (multiplication concatenates
words), so a generator word's coefficient tensor is the Kronecker product of
the generators' dense coefficient vectors; both directions run on those
dense vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import SuperorthoBasis
from .freepoly import COEFF_EPS, FreePoly, HomogeneousSlice, format_poly, parse_poly

DEFAULT_RESIDUAL_TOL = 1e-9


class RewriteError(ValueError):
    """Input is not expressible over the basis (non-invariant or truncated)."""


@dataclass(frozen=True)
class HatPoly:
    """A free polynomial whose letters are 1-based basis-generator indices."""

    poly: FreePoly
    basis_fingerprint: str
    generator_degrees: tuple

    def weighted_degree(self, word: tuple) -> int:
        """Total degree of the expanded word (sum of generator degrees)."""
        return sum(self.generator_degrees[k - 1] for k in word)

    def format(self) -> str:
        return format_poly(self.poly, letter="u")

    @classmethod
    def parse(cls, text: str, basis: SuperorthoBasis) -> HatPoly:
        poly = parse_poly(text, alphabet_size=max(len(basis.elements), 1), letter="u")
        return cls(
            poly=poly,
            basis_fingerprint=basis.fingerprint,
            generator_degrees=tuple(e.degree for e in basis.elements),
        )

    def _require_same_basis(self, other: HatPoly) -> None:
        if self.basis_fingerprint != other.basis_fingerprint:
            raise RewriteError("hat polynomials reference different bases")

    def __add__(self, other: HatPoly) -> HatPoly:
        self._require_same_basis(other)
        return HatPoly(self.poly + other.poly, self.basis_fingerprint, self.generator_degrees)

    def __sub__(self, other: HatPoly) -> HatPoly:
        self._require_same_basis(other)
        return HatPoly(self.poly - other.poly, self.basis_fingerprint, self.generator_degrees)

    def __mul__(self, other):
        if isinstance(other, HatPoly):
            self._require_same_basis(other)
            return HatPoly(self.poly * other.poly, self.basis_fingerprint, self.generator_degrees)
        return HatPoly(self.poly.scale(other), self.basis_fingerprint, self.generator_degrees)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HatPoly)
            and self.basis_fingerprint == other.basis_fingerprint
            and self.poly == other.poly
        )


def _dense_generators(basis: SuperorthoBasis) -> dict:
    """index -> (degree, dense coefficient vector); cached on the basis,
    which is immutable."""
    cache = getattr(basis, "_dense_generator_cache", None)
    if cache is None:
        cache = {
            e.index: (e.degree, e.poly.homogeneous_component(e.degree).coeffs)
            for e in basis.elements
        }
        object.__setattr__(basis, "_dense_generator_cache", cache)
    return cache


def rewrite(p: FreePoly, basis: SuperorthoBasis, tol: float = DEFAULT_RESIDUAL_TOL) -> HatPoly:
    """Express an invariant polynomial over the basis generators.

    For each homogeneous component, every generator word of matching total
    degree is enumerated (depth-first in index order, extending the running
    Kronecker product) and its coefficient read off by one inner product.
    The leftover after subtracting all contributions must vanish to `tol`
    relative to the input norm, otherwise the input was not invariant (or the
    basis is truncated too low).
    """
    if p.alphabet_size != basis.alphabet_size:
        raise RewriteError(
            f"polynomial alphabet {p.alphabet_size} does not match basis "
            f"alphabet {basis.alphabet_size}"
        )
    degrees = p.component_degrees()
    if degrees and degrees[-1] > basis.max_degree:
        raise RewriteError(
            f"polynomial degree {degrees[-1]} exceeds basis max_degree "
            f"{basis.max_degree}; rebuild the basis with a higher truncation"
        )
    generators = _dense_generators(basis)
    items = sorted(generators.items())  # (index, (degree, vector)) in index order
    min_degree = min((deg for _, (deg, _) in items), default=None)
    scale = max(1.0, p.norm())
    hat_terms: dict[tuple, complex] = {}
    if () in p.terms:
        hat_terms[()] = p.terms[()]

    for n in degrees:
        if n == 0:
            continue
        target = p.homogeneous_component(n).coeffs
        residual = target.copy()

        def descend(prefix: tuple, vec: np.ndarray, remaining: int) -> None:
            if remaining == 0:
                coeff = complex(np.vdot(vec, target))
                if abs(coeff) >= COEFF_EPS:
                    hat_terms[prefix] = coeff
                    residual[:] -= coeff * vec
                return
            if min_degree is None or remaining < min_degree:
                return
            for index, (deg, gen_vec) in items:
                if deg <= remaining:
                    descend(prefix + (index,), np.kron(vec, gen_vec), remaining - deg)

        descend((), np.ones(1, dtype=complex), n)
        leftover = float(np.linalg.norm(residual))
        if leftover > tol * scale:
            raise RewriteError(
                f"degree-{n} component leaves residual of norm {leftover:.3e} "
                f"(tolerance {tol * scale:.3e}); polynomial is not invariant"
            )

    return HatPoly(
        poly=FreePoly(max(len(basis.elements), 1), hat_terms),
        basis_fingerprint=basis.fingerprint,
        generator_degrees=tuple(e.degree for e in basis.elements),
    )


def expand(hat: HatPoly, basis: SuperorthoBasis) -> FreePoly:
    """Substitute the generators back for the letters of a hat polynomial."""
    if hat.basis_fingerprint != basis.fingerprint:
        raise RewriteError(
            "hat polynomial references a different basis "
            f"({hat.basis_fingerprint} != {basis.fingerprint})"
        )
    generators = _dense_generators(basis)
    d = basis.alphabet_size
    by_degree: dict[int, np.ndarray] = {}
    constant = 0j
    for word, coeff in hat.poly.terms.items():
        vec = np.ones(1, dtype=complex)
        total = 0
        for k in word:
            if k not in generators:
                raise RewriteError(f"generator index {k} not present in the basis")
            deg, gen_vec = generators[k]
            vec = np.kron(vec, gen_vec)
            total += deg
        if total == 0:
            constant += coeff
            continue
        if total not in by_degree:
            by_degree[total] = np.zeros(d**total, dtype=complex)
        by_degree[total] += coeff * vec
    out = FreePoly(d, {(): constant} if constant else None)
    for degree in sorted(by_degree):
        out = out + HomogeneousSlice(d, degree, by_degree[degree]).to_poly()
    return out
