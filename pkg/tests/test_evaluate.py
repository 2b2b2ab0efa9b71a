"""Matrix-tuple evaluation, row-ball sampling, dilation, and shift operators."""

from __future__ import annotations

import numpy as np
import pytest

import freeinv as fi
from freeinv import FreePoly, OperatorTuple

from conftest import make_rep, random_invariant, random_poly


def test_eval_elementary_matrices():
    e12 = np.zeros((2, 2)); e12[0, 1] = 1
    e21 = np.zeros((2, 2)); e21[1, 0] = 1
    x = OperatorTuple(entries=(e12, e21))
    out = fi.eval_poly(FreePoly(2, {(1, 2): 1.0}), x)
    e11 = np.zeros((2, 2)); e11[0, 0] = 1
    assert np.array_equal(out, e11)


def test_eval_constant_gives_identity():
    x = fi.sample_row_contraction(2, 3, 0.5, seed=1)
    assert np.array_equal(fi.eval_poly(FreePoly.one(2), x), np.eye(3))


def test_eval_is_algebra_homomorphism():
    rng = np.random.default_rng(19)
    x = fi.sample_row_contraction(2, 3, 0.3, seed=4)
    for _ in range(10):
        p = random_poly(rng, 2, 3)
        q = random_poly(rng, 2, 3)
        prod = fi.eval_poly(p, x) @ fi.eval_poly(q, x)
        assert np.max(np.abs(fi.eval_poly(p * q, x) - prod)) < 1e-12
        total = fi.eval_poly(p, x) + fi.eval_poly(q, x)
        assert np.max(np.abs(fi.eval_poly(p + q, x) - total)) < 1e-12


def test_eval_arity_mismatch():
    x = fi.sample_row_contraction(3, 2, 0.5, seed=0)
    with pytest.raises(fi.EvaluationError, match="letters"):
        fi.eval_poly(FreePoly.one(2), x)


def test_operator_tuple_rejects_mixed_sizes():
    with pytest.raises(fi.EvaluationError):
        OperatorTuple(entries=(np.eye(2), np.eye(3)))


def test_sample_hits_requested_margin():
    x = fi.sample_row_contraction(2, 3, 0.1, seed=12)
    cert = fi.row_ball_certificate(x)
    assert cert.max_eigenvalue == pytest.approx(0.9, abs=1e-10)
    assert cert.strict


def test_sample_is_deterministic():
    a = fi.sample_row_contraction(2, 4, 0.2, seed=5)
    b = fi.sample_row_contraction(2, 4, 0.2, seed=5)
    for ma, mb in zip(a, b):
        assert np.array_equal(ma, mb)


def test_sample_scalar_case():
    x = fi.sample_row_contraction(1, 1, 0.5, seed=9)
    assert abs(x[0][0, 0]) ** 2 == pytest.approx(0.5, abs=1e-12)


def test_partial_row_ball_even_rep():
    basis = fi.build(make_rep("even2"), 2)
    for seed in range(5):
        x = fi.sample_row_contraction(2, 3, 0.1, seed=seed)
        report = fi.check_partial_row_ball(basis, x)
        assert report.psd_gap >= -1e-10
        assert report.ok


def test_partial_row_ball_sym2_through_degree_five():
    basis = fi.build_general(make_rep("sym2"), 5)
    for seed in range(5):
        x = fi.sample_row_contraction(2, 4, 0.1, seed=seed)
        report = fi.check_partial_row_ball(basis, x, max_degree=5)
        assert report.psd_gap >= -1e-10


def test_partial_row_ball_zero_tuple():
    basis = fi.build(make_rep("even2"), 2)
    zero = OperatorTuple(entries=(np.zeros((3, 3)), np.zeros((3, 3))))
    report = fi.check_partial_row_ball(basis, zero)
    assert report.psd_gap == pytest.approx(0.0, abs=1e-15)
    assert report.ok


def test_even_dilation_block_identities():
    u = fi.sample_row_contraction(4, 3, 0.2, seed=3)
    x = fi.even_dilation(u)
    words = ((1, 1), (1, 2), (2, 1), (2, 2))
    for k, word in enumerate(words):
        corner = fi.top_left_block(fi.eval_poly(FreePoly(2, {word: 1.0}), x), 3)
        assert np.max(np.abs(corner - u[k])) < 1e-12
    gram = x.row_gram()
    expected = np.zeros((9, 9), dtype=complex)
    expected[:3, :3] = u.row_gram()
    expected[3:, 3:] = np.eye(6)
    assert np.max(np.abs(gram - expected)) < 1e-12
    assert np.linalg.eigvalsh((gram + gram.conj().T) / 2)[-1] <= 1 + 1e-12


def test_even_dilation_rejects_bad_input():
    with pytest.raises(fi.EvaluationError, match="4 matrices"):
        fi.even_dilation(fi.sample_row_contraction(3, 2, 0.2, seed=0))
    overflow = OperatorTuple(entries=tuple(np.eye(2) for _ in range(4)))
    with pytest.raises(fi.EvaluationError, match="strict"):
        fi.even_dilation(overflow)


def test_quartic_corner_identity_and_norm_inequality():
    basis = fi.build(make_rep("even2"), 4)
    p = fi.parse_poly("1 + 3*x1*x2 - 7*x1*x1 - x2*x1*x2*x2")
    hat = fi.rewrite(p, basis)
    for seed in range(5):
        u = fi.sample_row_contraction(4, 2, 0.1, seed=seed)
        x = fi.even_dilation(u)
        corner = fi.top_left_block(fi.eval_poly(p, x), 2)
        direct = fi.eval_hat(hat, u)
        assert np.max(np.abs(corner - direct)) < 1e-10
        assert fi.operator_norm(direct) <= fi.operator_norm(fi.eval_poly(p, x)) + 1e-10


def test_fock_shift_single_letter_is_jordan_block():
    f = fi.truncated_fock_shifts(1, 2)
    expected = np.zeros((3, 3))
    expected[1, 0] = expected[2, 1] = 1
    assert np.array_equal(np.real(f[0]), expected)
    assert not np.any(np.imag(f[0]))


def test_fock_row_gram_is_a_projection():
    f = fi.truncated_fock_shifts(2, 3)
    eigs = np.linalg.eigvalsh(f.row_gram())
    assert np.all(np.minimum(np.abs(eigs), np.abs(eigs - 1)) < 1e-12)


def test_fock_shifts_are_joint_isometries_below_the_cut():
    d, level = 2, 3
    f = fi.truncated_fock_shifts(d, level)
    cut = sum(d**k for k in range(level))  # words of degree <= level-1 come first
    for i in range(d):
        for j in range(d):
            block = (f[i].conj().T @ f[j])[:cut, :cut]
            target = np.eye(cut) if i == j else np.zeros((cut, cut))
            assert np.max(np.abs(block - target)) < 1e-12


def test_basis_images_land_in_the_row_ball():
    basis = fi.build(make_rep("even2"), 4)
    x = fi.sample_row_contraction(2, 3, 0.1, seed=8)
    phi = fi.basis_images(basis, x)
    assert fi.row_ball_certificate(phi).strict


def test_inductive_containment_including_carried_complement():
    # The construction guarantees more than the generator containment: at
    # every degree n, adding the images of the carried complement polynomials
    # still stays below sum X X*, with exact equality at degree 1.
    from freeinv.freepoly import HomogeneousSlice

    for name in ("sym2", "even2", "cyclic3", "sym3"):
        rep = make_rep(name)
        basis = fi.build_general(rep, 3)
        d = rep.dim
        for seed in range(3):
            x = fi.sample_row_contraction(d, 3, 0.1, seed=seed)
            bound = x.row_gram()
            for n in sorted(basis.complements):
                partial = np.zeros_like(bound)
                for e in basis.elements:
                    if e.degree <= n:
                        img = fi.eval_poly(e.poly, x)
                        partial += img @ img.conj().T
                comp = basis.complements[n]
                for j in range(comp.shape[1]):
                    w = HomogeneousSlice(d, n, comp[:, j]).to_poly()
                    img = fi.eval_poly(w, x)
                    partial += img @ img.conj().T
                gap = np.linalg.eigvalsh(bound - partial)
                assert gap[0] >= -1e-10, (name, n)
                if n == 1:
                    assert np.max(np.abs(bound - partial)) < 1e-12, name


def test_factored_form_composed_with_basis_images_reproduces_p():
    # p(X) equals hat(p) evaluated on (u_1(X), u_2(X), ...) entrywise.
    rng = np.random.default_rng(71)
    for name in ("even2", "sym2", "cyclic3"):
        rep = make_rep(name)
        basis = fi.build(rep, 4)
        for seed in range(3):
            p = random_invariant(rng, rep, 4)
            hat = fi.rewrite(p, basis)
            x = fi.sample_row_contraction(rep.dim, 3, 0.1, seed=seed)
            direct = fi.eval_poly(p, x)
            composed = fi.eval_hat(hat, fi.basis_images(basis, x))
            scale = max(1.0, fi.operator_norm(direct))
            assert np.max(np.abs(direct - composed)) < 1e-10 * scale, name


def test_sup_experiment_constant_polynomial():
    basis = fi.build(make_rep("even2"), 2)
    p = FreePoly(2, {(): -3.0})
    hat = fi.rewrite(p, basis)
    report = fi.sup_norm_experiment(p, hat, basis, trials=4, sizes=(2,), seed=0)
    assert report.sup_p_est == pytest.approx(3.0, abs=1e-12)
    assert report.sup_hat_est == pytest.approx(3.0, abs=1e-12)
    assert report.fock_upper_est == pytest.approx(3.0, abs=1e-12)
    assert report.ok


def test_sup_experiment_quartic_example():
    basis = fi.build(make_rep("even2"), 4)
    p = fi.parse_poly("1 + 3*x1*x2 - 7*x1*x1 - x2*x1*x2*x2")
    hat = fi.rewrite(p, basis)
    report = fi.sup_norm_experiment(p, hat, basis, trials=10, sizes=(2, 3), seed=2)
    assert report.ok, report.violations
    assert report.max_identity_gap < 1e-10
    assert report.sup_hat_est <= report.fock_upper_est + 1e-8
    # the factored side sees at least everything the original side attains
    assert report.sup_hat_est >= report.sup_p_est - 1e-10


def test_sup_experiment_reproducible():
    basis = fi.build(make_rep("even2"), 2)
    p = fi.parse_poly("x1*x2 + x2*x1")
    hat = fi.rewrite(p, basis)
    one = fi.sup_norm_experiment(p, hat, basis, trials=5, sizes=(2, 3), seed=11)
    two = fi.sup_norm_experiment(p, hat, basis, trials=5, sizes=(2, 3), seed=11)
    assert one.to_json_dict() == two.to_json_dict()
