"""Construction of superorthogonal bases for rings of invariant free
polynomials.

A superorthonormal basis is a degree-ordered family of unit-norm homogeneous
invariant polynomials u_1, u_2, ... such that u_i * q is orthogonal to
u_j * r for i != j and arbitrary polynomials q, r.  Two constructions are
provided:

* `build_general` runs the recursive working-space construction: the working
  space at degree 1 is the whole space of linear polynomials; at each degree
  the group-averaging projector restricted to the working space is
  diagonalized, its fixed vectors become new basis elements, and the carried
  orthogonal complement tensored with the letters becomes the next working
  space.  All linear algebra happens in the pruned working-space coordinates
  (dimension: carried complement x alphabet), never on full degree-n
  coefficient matrices.

* `build_abelian` is the fast path for commuting representations: it
  simultaneously diagonalizes the action on linear polynomials and emits the
  monomials in the eigenpolynomials whose eigenvalue product is trivial and
  has no trivial proper prefix.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .counting import count_report
from .freepoly import FreePoly, HomogeneousSlice, format_poly
from .groups import UnitaryRep, _apply_tensor_power

# Eigenvalues of the restricted averaging projector must cluster at {0, 1};
# anything in this open band means the working space was not invariant.
_SPECTRUM_BAND = (0.1, 0.9)
_FIXED_THRESHOLD = 0.5
# Joint-eigenvalue clustering and trivial-character tests in the abelian path.
_CHAR_TOL = 1e-8
_ELEMENT_TOL = 1e-10


class BuildError(ValueError):
    """Basis construction failed (bad input or broken numerical invariant)."""


@dataclass(frozen=True)
class BasisElement:
    """One generator: a unit-norm homogeneous invariant polynomial."""

    index: int  # 1-based position in the (degree, tie-break) order
    degree: int
    poly: FreePoly


@dataclass(frozen=True, eq=False)
class SuperorthoBasis:
    """All generators of degree <= max_degree plus, per degree, the
    orthonormal coefficient matrix of the carried (non-invariant) subspace.

    `complements` maps degree -> (d**degree, k) matrix with orthonormal
    columns; it is None for bases loaded from serialized form, which carry
    only the elements.
    """

    rep: UnitaryRep
    max_degree: int
    elements: tuple
    complements: dict | None
    fingerprint: str

    @property
    def alphabet_size(self) -> int:
        return self.rep.dim

    def elements_of_degree(self, degree: int) -> list[BasisElement]:
        return [e for e in self.elements if e.degree == degree]

    def degree_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for e in self.elements:
            counts[e.degree] = counts.get(e.degree, 0) + 1
        return counts

    def coefficient_matrix(self, degree: int) -> np.ndarray:
        """Dense (d**degree, count) matrix of the degree-n generators."""
        cols = [
            e.poly.homogeneous_component(degree).coeffs
            for e in self.elements_of_degree(degree)
        ]
        if not cols:
            return np.zeros((self.alphabet_size**degree, 0), dtype=complex)
        return np.stack(cols, axis=1)

    def to_json_dict(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "alphabet_size": self.alphabet_size,
            "max_degree": self.max_degree,
            "elements": [
                {
                    "index": e.index,
                    "degree": e.degree,
                    "polynomial": format_poly(e.poly),
                    "terms": [
                        {"word": list(w), "coeff": [c.real, c.imag]}
                        for w, c in sorted(e.poly.terms.items())
                    ],
                }
                for e in self.elements
            ],
        }


def basis_fingerprint(rep: UnitaryRep, max_degree: int) -> str:
    """Digest identifying the (group, representation, truncation) contract."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(rep.group.mult, dtype=np.int64).tobytes())
    rounded = np.round(np.ascontiguousarray(rep.matrices, dtype=complex), 12) + 0.0
    h.update(rounded.tobytes())
    h.update(str(max_degree).encode())
    return h.hexdigest()[:16]


def basis_from_json_dict(data: dict, rep: UnitaryRep) -> SuperorthoBasis:
    """Rebuild a basis from its serialized form; geometric invariants are
    NOT revalidated here (see `check_superorthogonality` and the CLI verify
    command for that)."""
    d = int(data["alphabet_size"])
    if d != rep.dim:
        raise BuildError(f"basis alphabet {d} does not match rep dimension {rep.dim}")
    max_degree = int(data["max_degree"])
    elements = []
    for entry in data["elements"]:
        terms = {
            tuple(item["word"]): complex(item["coeff"][0], item["coeff"][1])
            for item in entry["terms"]
        }
        poly = FreePoly(d, terms)
        elements.append(BasisElement(index=int(entry["index"]), degree=int(entry["degree"]), poly=poly))
    elements.sort(key=lambda e: e.index)
    return SuperorthoBasis(
        rep=rep,
        max_degree=max_degree,
        elements=tuple(elements),
        complements=None,
        fingerprint=str(data["fingerprint"]),
    )


# -- deterministic ordering and phase ----------------------------------------


def _first_significant(column: np.ndarray, tol: float = 1e-9) -> int:
    hits = np.nonzero(np.abs(column) > tol)[0]
    if len(hits) == 0:
        raise BuildError("basis column is numerically zero")
    return int(hits[0])


def _canonical_columns(matrix: np.ndarray) -> np.ndarray:
    """Order columns by (first significant row, descending magnitude there)
    and rotate each so that entry is positive real."""
    cols = []
    for j in range(matrix.shape[1]):
        col = matrix[:, j]
        lead = _first_significant(col)
        phase = col[lead] / abs(col[lead])
        cols.append((lead, -round(abs(col[lead]), 9), j, col * np.conj(phase)))
    cols.sort(key=lambda item: item[:3])
    return np.stack([c for *_ignored, c in cols], axis=1)


# -- general recursive construction ------------------------------------------


def build_general(rep: UnitaryRep, max_degree: int) -> SuperorthoBasis:
    """Recursive working-space construction, valid for any finite group."""
    if max_degree < 1:
        raise BuildError(f"max_degree must be >= 1, got {max_degree}")
    d = rep.dim
    n_group = rep.group.order

    elements: list[BasisElement] = []
    complements: dict[int, np.ndarray] = {}
    # Action of each group element on the current working space, in pruned
    # orthonormal coordinates; at degree 1 that space is all of C^d.
    act_mats = rep.matrices.copy()
    prev_comp_embed: np.ndarray | None = None  # degree-(n-1) complement coefficients

    for degree in range(1, max_degree + 1):
        projector = act_mats.mean(axis=0)
        projector = (projector + projector.conj().T) / 2
        eigvals, eigvecs = np.linalg.eigh(projector)
        if np.any((eigvals > _SPECTRUM_BAND[0]) & (eigvals < _SPECTRUM_BAND[1])):
            raise BuildError(
                f"averaging projector at degree {degree} has eigenvalues "
                f"inside {_SPECTRUM_BAND}; working space is not group-invariant"
            )
        fixed = eigvecs[:, eigvals >= _FIXED_THRESHOLD]
        comp = eigvecs[:, eigvals < _FIXED_THRESHOLD]

        def to_coefficients(pruned: np.ndarray) -> np.ndarray:
            # Pruned coordinates are (complement basis element, letter) pairs;
            # expand through the stored complement coefficient columns.
            if prev_comp_embed is None:
                return pruned
            k = prev_comp_embed.shape[1]
            t = pruned.shape[1]
            flat = prev_comp_embed @ pruned.reshape(k, d * t)
            # (prefix, letter*t) row-major flattening matches (prefix, letter)
            # word indexing, so a plain reshape lands in lexicographic order.
            return flat.reshape(d**degree, t)

        if fixed.shape[1]:
            coeff_fixed = _canonical_columns(to_coefficients(fixed))
            _validate_columns(rep, coeff_fixed, degree)
            for j in range(coeff_fixed.shape[1]):
                poly = HomogeneousSlice(d, degree, coeff_fixed[:, j]).to_poly()
                elements.append(BasisElement(index=len(elements) + 1, degree=degree, poly=poly))

        comp_embed = to_coefficients(comp)
        complements[degree] = comp_embed
        if comp.shape[1] == 0 or degree == max_degree:
            break

        restricted = np.stack(
            [comp.conj().T @ act_mats[g] @ comp for g in range(n_group)]
        )
        act_mats = np.stack(
            [np.kron(restricted[g], rep.matrices[g]) for g in range(n_group)]
        )
        prev_comp_embed = comp_embed

    _validate_counts(rep, elements, max_degree)
    return SuperorthoBasis(
        rep=rep,
        max_degree=max_degree,
        elements=tuple(elements),
        complements=complements,
        fingerprint=basis_fingerprint(rep, max_degree),
    )


def _validate_counts(rep: UnitaryRep, elements: list, max_degree: int) -> None:
    """Cross-check construction against the character series: the number of
    degree-n generators is forced to be g_n."""
    expected = count_report(rep.character(), max_degree).g
    got = [0] * (max_degree + 1)
    for e in elements:
        got[e.degree] += 1
    if got != list(expected):
        raise BuildError(
            f"construction produced per-degree counts {got[1:]}, but the "
            f"character series demands {list(expected[1:])}"
        )


def _validate_element(rep: UnitaryRep, poly: FreePoly, degree: int) -> None:
    if abs(poly.norm() - 1.0) > _ELEMENT_TOL:
        raise BuildError(f"degree-{degree} element has norm {poly.norm()}, expected 1")
    if not rep.is_invariant(poly, _ELEMENT_TOL):
        raise BuildError(f"degree-{degree} element is not invariant under the action")


def _validate_columns(rep: UnitaryRep, coeffs: np.ndarray, degree: int) -> None:
    """Dense batch version of the per-element checks (unit norm, invariance)."""
    norms = np.linalg.norm(coeffs, axis=0)
    if np.max(np.abs(norms - 1.0)) > _ELEMENT_TOL:
        raise BuildError(f"degree-{degree} element norms deviate from 1: {norms}")
    averaged = np.zeros_like(coeffs)
    for g in rep.group.elements():
        averaged += _apply_tensor_power(rep.matrices[g], coeffs, rep.dim, degree)
    averaged /= rep.group.order
    worst = float(np.max(np.abs(averaged - coeffs)))
    if worst > _ELEMENT_TOL:
        raise BuildError(
            f"degree-{degree} elements are not invariant (max deviation {worst:.3e})"
        )


# -- abelian fast path --------------------------------------------------------


def _simultaneous_eigenbasis(rep: UnitaryRep) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal joint eigenvectors of all pi(g), with their eigenvalue
    rows; raises BuildError when the matrices do not commute."""
    if not rep.is_abelian_action():
        raise BuildError("representation matrices do not commute; no diagonal form")
    d = rep.dim
    blocks = [np.eye(d, dtype=complex)]
    for g in rep.group.elements():
        mat = rep.matrices[g]
        for herm in ((mat + mat.conj().T) / 2, (mat - mat.conj().T) / 2j):
            refined = []
            for block in blocks:
                if block.shape[1] == 1:
                    refined.append(block)
                    continue
                sub = block.conj().T @ herm @ block
                sub = (sub + sub.conj().T) / 2
                eigvals, eigvecs = np.linalg.eigh(sub)
                start = 0
                for stop in range(1, len(eigvals) + 1):
                    if stop == len(eigvals) or eigvals[stop] - eigvals[stop - 1] > _CHAR_TOL:
                        refined.append(block @ eigvecs[:, start:stop])
                        start = stop
            blocks = refined
    vectors = np.concatenate(blocks, axis=1)
    eigenvalues = np.empty((d, rep.group.order), dtype=complex)
    for i in range(d):
        v = vectors[:, i]
        for g in rep.group.elements():
            image = rep.matrices[g] @ v
            lam = np.vdot(v, image)
            if np.linalg.norm(image - lam * v) > _CHAR_TOL:
                raise BuildError("joint diagonalization failed; residual too large")
            eigenvalues[i, g] = lam
    return vectors, eigenvalues


def build_abelian(rep: UnitaryRep, max_degree: int) -> SuperorthoBasis:
    """Monomial basis in the joint eigenpolynomials of a commuting action.

    A word in the eigenpolynomials is invariant exactly when its eigenvalue
    product is trivial; the basis keeps the primitive ones (no proper
    nonempty prefix already invariant).
    """
    if max_degree < 1:
        raise BuildError(f"max_degree must be >= 1, got {max_degree}")
    d = rep.dim
    vectors, eigenvalues = _simultaneous_eigenbasis(rep)

    # Deterministic eigenvector order: trivial eigenvalue rows first, then by
    # eigenvalue row, then by leading-coordinate shape; fixed phase.
    def sort_key(i: int):
        row = eigenvalues[i]
        row_key = tuple((-round(c.real, 8), round(c.imag, 8)) for c in row)
        col = vectors[:, i]
        lead = _first_significant(col)
        return row_key + (lead, -round(abs(col[lead]), 9))

    order = sorted(range(d), key=sort_key)
    vectors = _canonical_phase(vectors[:, order])
    eigenvalues = eigenvalues[order]

    eigenpolys = [HomogeneousSlice(d, 1, vectors[:, i]).to_poly() for i in range(d)]
    trivial = np.ones(rep.group.order, dtype=complex)

    found: list[tuple[int, tuple]] = []

    def extend(prefix: tuple, char_product: np.ndarray) -> None:
        for i in range(d):
            word = prefix + (i,)
            product = char_product * eigenvalues[i]
            if np.max(np.abs(product - trivial)) <= _CHAR_TOL:
                found.append((len(word), word))
            elif len(word) < max_degree:
                extend(word, product)

    extend((), trivial.copy())
    found.sort()

    elements = []
    for rank, (degree, word) in enumerate(found, start=1):
        poly = FreePoly.one(d)
        for i in word:
            poly = poly * eigenpolys[i]
        _validate_element(rep, poly, degree)
        elements.append(BasisElement(index=rank, degree=degree, poly=poly))

    _validate_counts(rep, elements, max_degree)
    return SuperorthoBasis(
        rep=rep,
        max_degree=max_degree,
        elements=tuple(elements),
        complements=None,
        fingerprint=basis_fingerprint(rep, max_degree),
    )


def _canonical_phase(matrix: np.ndarray) -> np.ndarray:
    out = matrix.copy()
    for j in range(out.shape[1]):
        lead = _first_significant(out[:, j])
        phase = out[lead, j] / abs(out[lead, j])
        out[:, j] = out[:, j] * np.conj(phase)
    return out


def build(rep: UnitaryRep, max_degree: int, method: str = "auto") -> SuperorthoBasis:
    """Dispatch: the abelian fast path when the action commutes (or is
    forced), the general recursion otherwise."""
    if method == "general":
        return build_general(rep, max_degree)
    if method == "abelian":
        return build_abelian(rep, max_degree)
    if method == "auto":
        if rep.is_abelian_action():
            return build_abelian(rep, max_degree)
        return build_general(rep, max_degree)
    raise BuildError(f"unknown method {method!r}; use general, abelian, or auto")


# -- verification -------------------------------------------------------------


@dataclass(frozen=True)
class SuperorthoReport:
    """Outcome of the pairwise superorthogonality sweep."""

    max_violation: float
    checked_values: int
    violations: tuple  # (index_a, index_b, bridge_word, |value|) beyond tol
    tol: float

    @property
    def ok(self) -> bool:
        return not self.violations


def check_superorthogonality(
    basis: SuperorthoBasis, max_pad: int = 0, tol: float = 1e-10
) -> SuperorthoReport:
    """Exhaustively verify <u_a w, u_b w'> = 0 over all index pairs a != b and
    all padding words w, w' of matching total degree up to max_degree + max_pad.

    Multiplying by a padding word only relocates coefficients (words never
    collide), so every padded inner product equals either zero outright (the
    padded supports are disjoint) or one of the bridge values
    <u_a * s, u_b> with |s| = deg(u_b) - deg(u_a).  Sweeping all bridge words
    s therefore covers the entire padded family exactly, no sampling involved.
    """
    if max_pad < 0:
        raise ValueError(f"max_pad must be >= 0, got {max_pad}")
    d = basis.alphabet_size
    dense = [
        (e.index, e.degree, e.poly.homogeneous_component(e.degree).coeffs)
        for e in basis.elements
    ]
    max_violation = 0.0
    checked = 0
    violations = []
    for pos_a in range(len(dense)):
        for pos_b in range(pos_a + 1, len(dense)):
            low, high = dense[pos_a], dense[pos_b]
            if low[1] > high[1]:
                low, high = high, low
            idx_a, deg_a, vec_a = low
            idx_b, deg_b, vec_b = high
            # values[s] = <u_a * s, u_b> over all bridge words s
            bridge = vec_b.reshape(d**deg_a, d ** (deg_b - deg_a))
            values = vec_a @ bridge.conj()
            checked += values.size
            worst = float(np.max(np.abs(values)))
            max_violation = max(max_violation, worst)
            if worst > tol:
                for s in np.nonzero(np.abs(values) > tol)[0]:
                    violations.append((idx_a, idx_b, int(s), float(abs(values[s]))))
    return SuperorthoReport(
        max_violation=max_violation,
        checked_values=checked,
        violations=tuple(violations),
        tol=tol,
    )


def span_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Distance between the column spans of two matrices with orthonormal
    columns: the largest residual after projecting either onto the other.
    Zero iff the orthogonal projections onto the spans coincide."""
    if a.shape[1] != b.shape[1]:
        return 1.0
    if a.shape[1] == 0:
        return 0.0
    res_a = a - b @ (b.conj().T @ a)
    res_b = b - a @ (a.conj().T @ b)
    return float(max(np.linalg.norm(res_a, 2), np.linalg.norm(res_b, 2)))
