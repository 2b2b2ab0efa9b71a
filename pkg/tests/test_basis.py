"""Basis construction: counts, spans, superorthogonality, determinism."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

import freeinv as fi
from freeinv import FreePoly

from conftest import BUILTIN_NAMES, make_rep


def dense_matrix(polys, degree):
    cols = [p.homogeneous_component(degree).coeffs for p in polys]
    return np.stack(cols, axis=1)


def sym2_fixture_polys(n_max):
    """A, B^2, BAB, BA^2B, ... with A = (x1+x2)/sqrt2, B = (x1-x2)/sqrt2."""
    a = fi.parse_poly("x1 + x2").scale(1 / np.sqrt(2))
    b = fi.parse_poly("x1 - x2").scale(1 / np.sqrt(2))
    fixtures = [a]
    for n in range(2, n_max + 1):
        middle = FreePoly.one(2)
        for _ in range(n - 2):
            middle = middle * a
        fixtures.append(b * middle * b)
    return fixtures


def cyclic3_eigenpolys():
    omega = np.exp(2j * np.pi / 3)
    u0 = fi.parse_poly("x1 + x2 + x3").scale(1 / np.sqrt(3))
    u_plus = FreePoly(3, {(1,): 1, (2,): omega, (3,): np.conj(omega)}).scale(1 / np.sqrt(3))
    u_minus = FreePoly(3, {(1,): 1, (2,): np.conj(omega), (3,): omega}).scale(1 / np.sqrt(3))
    return u0, u_plus, u_minus


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_general_counts_match_series(name, reps):
    rep = reps[name]
    built = fi.build_general(rep, 4)
    g = fi.count_report(rep.character(), 4).g
    for n in range(1, 5):
        assert len(built.elements_of_degree(n)) == g[n], (name, n)


def test_even_rep_basis_is_the_four_quadratics(reps):
    for method in ("general", "abelian"):
        built = fi.build(reps["even2"], 2, method=method)
        assert [e.degree for e in built.elements] == [2, 2, 2, 2]
        target = np.eye(4, dtype=complex)  # all degree-2 words
        assert fi.span_distance(built.coefficient_matrix(2), target) < 1e-10


def test_sym2_basis_matches_alternating_towers(reps):
    built = fi.build_general(reps["sym2"], 4)
    assert [e.degree for e in built.elements] == [1, 2, 3, 4]
    for n, fixture in zip(range(1, 5), sym2_fixture_polys(4)):
        dist = fi.span_distance(
            built.coefficient_matrix(n), dense_matrix([fixture], n)
        )
        assert dist < 1e-10, n


def test_trivial_group_stops_after_letters(reps):
    built = fi.build_general(reps["trivial2"], 3)
    assert {fi.format_poly(e.poly) for e in built.elements} == {"x1", "x2"}
    assert built.degree_counts() == {1: 2}


def test_abelian_cyclic3_eigen_structure(reps):
    built = fi.build_abelian(reps["cyclic3"], 2)
    u0, u_plus, u_minus = cyclic3_eigenpolys()
    degree_one = built.elements_of_degree(1)
    assert len(degree_one) == 1
    assert fi.span_distance(
        built.coefficient_matrix(1), dense_matrix([u0], 1)
    ) < 1e-10
    degree_two = built.elements_of_degree(2)
    assert len(degree_two) == 2
    target = dense_matrix([u_plus * u_minus, u_minus * u_plus], 2)
    assert fi.span_distance(built.coefficient_matrix(2), target) < 1e-10


def test_abelian_counts_follow_doubling(reps):
    built = fi.build_abelian(reps["cyclic3"], 4)
    assert [len(built.elements_of_degree(n)) for n in range(1, 5)] == [1, 2, 4, 8]


def test_abelian_and_general_spans_agree(reps):
    for name in ("even2", "cyclic3"):
        rep = reps[name]
        via_a = fi.build_abelian(rep, 4)
        via_g = fi.build_general(rep, 4)
        for n in range(1, 5):
            dist = fi.span_distance(via_a.coefficient_matrix(n), via_g.coefficient_matrix(n))
            assert dist < 1e-10, (name, n)


def test_abelian_rejects_noncommuting_action(reps):
    with pytest.raises(fi.BuildError, match="commute"):
        fi.build_abelian(reps["sym3"], 2)


def test_abelian_diagonal_rep_yields_pure_word_generators():
    # When the action is already diagonal, the eigenpolynomials are letters
    # and every generator is a single monomial.
    group, _ = fi.cyclic_group(3)
    omega = np.exp(2j * np.pi / 3)
    rep = fi.UnitaryRep.from_diagonals(
        group,
        [[1, 1, 1], [1, omega, np.conj(omega)], [1, np.conj(omega), omega]],
    )
    built = fi.build_abelian(rep, 3)
    assert [len(built.elements_of_degree(n)) for n in range(1, 4)] == [1, 2, 4]
    for e in built.elements:
        assert len(e.poly.terms) == 1
        ((word, coeff),) = e.poly.terms.items()
        assert abs(abs(coeff) - 1.0) < 1e-12
        assert len(word) == e.degree
    assert built.elements[0].poly == fi.FreePoly(3, {(1,): 1.0})


def test_build_dispatch(reps):
    assert fi.build(reps["cyclic3"], 3, method="auto").degree_counts() == {1: 1, 2: 2, 3: 4}
    assert fi.build(reps["sym3"], 3, method="auto").degree_counts() == {1: 1, 2: 1, 3: 2}
    with pytest.raises(fi.BuildError):
        fi.build(reps["sym2"], 2, method="nonsense")
    with pytest.raises(fi.BuildError):
        fi.build_general(reps["sym2"], 0)


def test_elements_unit_norm_invariant_and_orthogonal(reps, bases6):
    for name in BUILTIN_NAMES:
        rep = reps[name]
        built = bases6[name]
        for e in built.elements:
            assert abs(e.poly.norm() - 1.0) < 1e-10
            assert e.poly.is_homogeneous()
            assert rep.is_invariant(e.poly, 1e-10)
        for n in set(e.degree for e in built.elements):
            mat = built.coefficient_matrix(n)
            gram = mat.conj().T @ mat
            assert np.max(np.abs(gram - np.eye(mat.shape[1]))) < 1e-10


def test_indices_are_contiguous_and_degree_sorted(bases6):
    for built in bases6.values():
        assert [e.index for e in built.elements] == list(range(1, len(built.elements) + 1))
        degrees = [e.degree for e in built.elements]
        assert degrees == sorted(degrees)


def test_sym3_degree_two_element_is_the_symmetrized_pair(reps):
    # The unique degree-2 generator spans (u+u- + u-u+)/sqrt2 in the
    # cyclic-eigenpolynomial notation.
    built = fi.build_general(reps["sym3"], 2)
    _, u_plus, u_minus = cyclic3_eigenpolys()
    fixture = (u_plus * u_minus + u_minus * u_plus).scale(1 / np.sqrt(2))
    assert abs(fixture.norm() - 1.0) < 1e-12
    assert len(built.elements_of_degree(2)) == 1
    dist = fi.span_distance(built.coefficient_matrix(2), dense_matrix([fixture], 2))
    assert dist < 1e-10


def test_sym3_table_through_degree_four(reps):
    # Fixture spans from the hand-built symmetrized-product table: pair each
    # primitive cyclic-invariant product b with its swap image tau(b)
    # (tau exchanges u+ and u-) as (b + tau(b))/sqrt2, plus the square of the
    # antisymmetric quadratic combination at degree 4.
    u0, up, um = cyclic3_eigenpolys()

    def sym_pair(*factors):
        swapped = {id(u0): u0, id(up): um, id(um): up}
        left = FreePoly.one(3)
        right = FreePoly.one(3)
        for f in factors:
            left = left * f
            right = right * swapped[id(f)]
        return (left + right).scale(1 / np.sqrt(2))

    anti_quad = (up * um - um * up).scale(1 / np.sqrt(2))
    fixtures = {
        1: [u0],
        2: [sym_pair(up, um)],
        3: [sym_pair(up, up, up), sym_pair(up, u0, um)],
        4: [
            sym_pair(up, up, um, um),
            sym_pair(up, u0, up, up),
            sym_pair(up, u0, u0, um),
            sym_pair(up, up, u0, up),
            anti_quad * anti_quad,
        ],
    }
    built = fi.build_general(reps["sym3"], 4)
    for n, polys in fixtures.items():
        for p in polys:
            assert abs(p.norm() - 1.0) < 1e-12
            assert reps["sym3"].is_invariant(p, 1e-10)
        dist = fi.span_distance(built.coefficient_matrix(n), dense_matrix(polys, n))
        assert dist < 1e-10, n


def brute_force_superortho_violation(built, max_pad):
    """Literal double sweep over all padding word pairs."""
    d = built.alphabet_size
    worst = 0.0
    limit = built.max_degree + max_pad
    for ea, eb in itertools.combinations(built.elements, 2):
        for total in range(max(ea.degree, eb.degree), limit + 1):
            for wa in itertools.product(range(1, d + 1), repeat=total - ea.degree):
                pa = ea.poly * FreePoly(d, {tuple(wa): 1.0})
                for wb in itertools.product(range(1, d + 1), repeat=total - eb.degree):
                    pb = eb.poly * FreePoly(d, {tuple(wb): 1.0})
                    worst = max(worst, abs(pa.inner(pb)))
    return worst


def test_superortho_check_matches_brute_force_even2(reps):
    built = fi.build(reps["even2"], 2)
    report = fi.check_superorthogonality(built, max_pad=2, tol=1e-10)
    assert report.ok
    assert brute_force_superortho_violation(built, 2) == pytest.approx(
        report.max_violation, abs=1e-14
    )


def test_superortho_check_matches_brute_force_sym2(reps):
    built = fi.build_general(reps["sym2"], 3)
    report = fi.check_superorthogonality(built, max_pad=2, tol=1e-10)
    assert report.ok
    assert report.max_violation < 1e-12
    assert brute_force_superortho_violation(built, 2) <= report.max_violation + 1e-14


def test_superortho_desk_scale_examples(reps):
    for name, n_max in (("even2", 2), ("sym2", 4)):
        built = fi.build(reps[name], n_max)
        report = fi.check_superorthogonality(built, max_pad=2, tol=1e-10)
        assert report.max_violation < 1e-12


def test_superortho_single_element_vacuous():
    rep = fi.UnitaryRep.from_matrices(fi.trivial_group(), [np.eye(1)])
    built = fi.build_general(rep, 2)
    assert len(built.elements) == 1
    report = fi.check_superorthogonality(built, max_pad=2)
    assert report.max_violation == 0.0
    assert report.checked_values == 0


def test_distinct_generator_words_are_orthonormal(bases6):
    # Words in the generators of equal total degree, exhaustively to degree 5.
    for name in BUILTIN_NAMES:
        built = bases6[name]
        d = built.alphabet_size
        by_total: dict[int, list[np.ndarray]] = {}
        generators = [(e.index, e.degree, e.poly.homogeneous_component(e.degree).coeffs) for e in built.elements]

        def grow(vec, total):
            if 0 < total <= 5:
                by_total.setdefault(total, []).append(vec)
            if total >= 5:
                return
            for _, deg, gvec in generators:
                if total + deg <= 5:
                    grow(np.kron(vec, gvec), total + deg)

        grow(np.ones(1, dtype=complex), 0)
        f = fi.count_report(built.rep.character(), 5).f
        for total, vecs in by_total.items():
            assert len(vecs) == f[total], (name, total)
            mat = np.stack(vecs, axis=1)
            gram = mat.conj().T @ mat
            assert np.max(np.abs(gram - np.eye(mat.shape[1]))) < 1e-12, (name, total)


def test_complements_are_orthonormal_and_orthogonal_to_elements(bases6):
    for name in BUILTIN_NAMES:
        built = bases6[name]
        assert built.complements is not None
        for degree, comp in built.complements.items():
            if comp.shape[1] == 0:
                continue
            gram = comp.conj().T @ comp
            assert np.max(np.abs(gram - np.eye(comp.shape[1]))) < 1e-10
            fixed = built.coefficient_matrix(degree)
            if fixed.shape[1]:
                assert np.max(np.abs(fixed.conj().T @ comp)) < 1e-10


def test_build_is_deterministic(reps):
    one = fi.build_general(reps["sym3"], 4)
    two = fi.build_general(reps["sym3"], 4)
    assert [e.poly.terms for e in one.elements] == [e.poly.terms for e in two.elements]
    assert one.fingerprint == two.fingerprint


def test_json_round_trip(reps):
    rep = reps["cyclic3"]
    built = fi.build_abelian(rep, 3)
    loaded = fi.basis_from_json_dict(built.to_json_dict(), rep)
    assert loaded.fingerprint == built.fingerprint
    assert loaded.max_degree == built.max_degree
    assert [e.poly for e in loaded.elements] == [e.poly for e in built.elements]
    report = fi.check_superorthogonality(loaded, max_pad=1)
    assert report.ok


def test_build_tolerates_rep_level_noise():
    # Matrices perturbed within the representation verification tolerance
    # must still produce a basis passing all geometric checks.
    rng = np.random.default_rng(2024)
    group, _ = fi.cyclic_group(2)
    noise = 1e-12 * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    rep = fi.UnitaryRep.from_matrices(group, [np.eye(2), -np.eye(2) + noise])
    built = fi.build_general(rep, 4)
    assert [len(built.elements_of_degree(n)) for n in range(1, 5)] == [0, 4, 0, 0]
    assert fi.check_superorthogonality(built, max_pad=2, tol=1e-10).ok


def test_fingerprint_depends_on_rep_and_degree(reps):
    a = fi.basis_fingerprint(reps["sym2"], 4)
    assert a == fi.basis_fingerprint(reps["sym2"], 4)
    assert a != fi.basis_fingerprint(reps["sym2"], 5)
    assert a != fi.basis_fingerprint(reps["even2"], 4)
