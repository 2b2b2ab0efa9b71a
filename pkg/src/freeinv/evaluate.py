"""Evaluation of free polynomials on matrix tuples and the row-ball
geometry checks.

The row ball consists of operator tuples X with sum X_i X_i* strictly below
the identity.  The basis generators map it into a higher-index row ball:
the partial sums sum u(X) u(X)* stay dominated by sum X_i X_i*, which is
what `check_partial_row_ball` verifies spectrally.  `even_dilation` builds
the explicit 3x3-block tuple that compresses onto a given 4-tuple, and
`truncated_fock_shifts` provides the extreme test points of the closed ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .basis import SuperorthoBasis
from .freepoly import FreePoly, words_of_degree
from .rewrite import HatPoly

PSD_TOL = 1e-10


class EvaluationError(ValueError):
    """Operator tuple does not match the polynomial or violates a precondition."""


@dataclass(frozen=True, eq=False)
class OperatorTuple:
    """A tuple of equal-size square complex matrices."""

    entries: tuple

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=complex) for m in self.entries)
        if not mats:
            raise EvaluationError("operator tuple needs at least one matrix")
        size = mats[0].shape[0]
        for m in mats:
            if m.ndim != 2 or m.shape != (size, size):
                raise EvaluationError(
                    f"all matrices must be square of equal size, got {m.shape}"
                )
        object.__setattr__(self, "entries", mats)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    @property
    def size(self) -> int:
        return self.entries[0].shape[0]

    def row_gram(self) -> np.ndarray:
        """sum X_i X_i*, the row Gram matrix."""
        out = np.zeros((self.size, self.size), dtype=complex)
        for m in self.entries:
            out += m @ m.conj().T
        return out


@dataclass(frozen=True)
class RowBallCertificate:
    """Spectral witness of (strict) row-ball membership."""

    max_eigenvalue: float
    margin: float  # 1 - max_eigenvalue

    @property
    def strict(self) -> bool:
        return self.margin > 0.0


def row_ball_certificate(x: OperatorTuple) -> RowBallCertificate:
    gram = x.row_gram()
    top = float(np.linalg.eigvalsh((gram + gram.conj().T) / 2)[-1])
    return RowBallCertificate(max_eigenvalue=top, margin=1.0 - top)


def eval_poly(p: FreePoly, x: OperatorTuple, _cache: dict | None = None) -> np.ndarray:
    """Substitute matrices for letters; the empty word becomes the identity."""
    if p.alphabet_size != len(x):
        raise EvaluationError(
            f"polynomial in {p.alphabet_size} letters cannot take a "
            f"{len(x)}-tuple argument"
        )
    size = x.size
    cache = _cache if _cache is not None else {(): np.eye(size, dtype=complex)}
    cache.setdefault((), np.eye(size, dtype=complex))

    def word_matrix(word: tuple) -> np.ndarray:
        if word not in cache:
            cache[word] = word_matrix(word[:-1]) @ x[word[-1] - 1]
        return cache[word]

    out = np.zeros((size, size), dtype=complex)
    for word, coeff in p.terms.items():
        out += coeff * word_matrix(word)
    return out


def eval_many(polys: Sequence[FreePoly], x: OperatorTuple) -> list[np.ndarray]:
    """Evaluate several polynomials on one tuple, sharing the word cache."""
    cache: dict = {(): np.eye(x.size, dtype=complex)}
    return [eval_poly(p, x, _cache=cache) for p in polys]


def eval_hat(hat: HatPoly, u: OperatorTuple) -> np.ndarray:
    return eval_poly(hat.poly, u)


def basis_images(basis: SuperorthoBasis, x: OperatorTuple, max_degree: int | None = None) -> OperatorTuple:
    """The tuple (u_1(X), u_2(X), ...) over generators of degree <= max_degree."""
    selected = [
        e.poly
        for e in basis.elements
        if max_degree is None or e.degree <= max_degree
    ]
    if not selected:
        return OperatorTuple(entries=(np.zeros((x.size, x.size), dtype=complex),))
    return OperatorTuple(entries=tuple(eval_many(selected, x)))


def sample_row_contraction(
    d: int, size: int, margin: float, seed: int | np.random.Generator = 0
) -> OperatorTuple:
    """d random complex matrices scaled so the row Gram matrix has top
    eigenvalue exactly 1 - margin; deterministic for a given seed."""
    if not 0.0 < margin < 1.0:
        raise EvaluationError(f"margin must be in (0, 1), got {margin}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    mats = rng.standard_normal((d, size, size)) + 1j * rng.standard_normal((d, size, size))
    gram = np.zeros((size, size), dtype=complex)
    for m in mats:
        gram += m @ m.conj().T
    top = float(np.linalg.eigvalsh((gram + gram.conj().T) / 2)[-1])
    scale = np.sqrt((1.0 - margin) / top)
    return OperatorTuple(entries=tuple(scale * m for m in mats))


@dataclass(frozen=True)
class PartialRowBallReport:
    """Spectral gap of sum X X* - sum u(X) u(X)* over the selected generators."""

    psd_gap: float  # smallest eigenvalue of the difference
    n_generators: int
    ok: bool
    certificate: RowBallCertificate
    tol: float


def check_partial_row_ball(
    basis: SuperorthoBasis,
    x: OperatorTuple,
    max_degree: int | None = None,
    tol: float = PSD_TOL,
) -> PartialRowBallReport:
    """Verify sum_{deg u <= N} u(X) u(X)* <= sum X_i X_i* in the PSD order."""
    cert = row_ball_certificate(x)
    selected = [
        e.poly
        for e in basis.elements
        if max_degree is None or e.degree <= max_degree
    ]
    images = eval_many(selected, x)
    diff = x.row_gram()
    for img in images:
        diff -= img @ img.conj().T
    gap = float(np.linalg.eigvalsh((diff + diff.conj().T) / 2)[0])
    return PartialRowBallReport(
        psd_gap=gap,
        n_generators=len(selected),
        ok=gap >= -tol and cert.strict,
        certificate=cert,
        tol=tol,
    )


def even_dilation(u: OperatorTuple) -> OperatorTuple:
    """Lift a strict row contraction (U1, U2, U3, U4) to a pair (X1, X2) of
    triple-size block matrices whose quadratic products compress onto the U's:

        X1 = [[0, U1, U2],    X2 = [[0, U3, U4],
              [I, 0,  0 ],          [0, 0,  0 ],
              [0, 0,  0 ]]          [I, 0,  0 ]]

    Then (X_i X_j) has U block-wise in its top-left corner and
    X1 X1* + X2 X2* = diag(sum U U*, I, I) <= I.
    """
    if len(u) != 4:
        raise EvaluationError(f"dilation needs exactly 4 matrices, got {len(u)}")
    cert = row_ball_certificate(u)
    if not cert.strict:
        raise EvaluationError(
            f"row Gram top eigenvalue is {cert.max_eigenvalue}; need a strict "
            "row contraction"
        )
    m = u.size
    zero = np.zeros((m, m), dtype=complex)
    eye = np.eye(m, dtype=complex)
    x1 = np.block([[zero, u[0], u[1]], [eye, zero, zero], [zero, zero, zero]])
    x2 = np.block([[zero, u[2], u[3]], [zero, zero, zero], [eye, zero, zero]])
    return OperatorTuple(entries=(x1, x2))


def top_left_block(matrix: np.ndarray, size: int) -> np.ndarray:
    return matrix[:size, :size]


def truncated_fock_shifts(d: int, level: int) -> OperatorTuple:
    """Left-multiplication (creation) operators on the span of words of
    degree <= level, compressed by killing anything of higher degree.

    The shifts have orthogonal ranges, so the row Gram matrix is the
    projection onto words of degree >= 1 (eigenvalues 0 and 1 only).
    """
    if level < 1:
        raise EvaluationError(f"level must be >= 1, got {level}")
    words: list[tuple] = []
    for degree in range(level + 1):
        words.extend(words_of_degree(d, degree))
    index = {w: i for i, w in enumerate(words)}
    size = len(words)
    mats = np.zeros((d, size, size), dtype=complex)
    for w, col in index.items():
        if len(w) < level:
            for i in range(1, d + 1):
                mats[i - 1, index[(i,) + w], col] = 1.0
    return OperatorTuple(entries=tuple(mats))


def fock_word_count(d: int, level: int) -> int:
    return sum(d**k for k in range(level + 1))


@dataclass(frozen=True)
class SupNormReport:
    """Monte Carlo envelope for the two sides of the norm-preservation claim.

    `fock_upper_est` evaluates the original polynomial on truncated shift
    operators; it increases toward the true common supremum as the truncation
    level grows, and every sampled factored-side norm should stay below it
    (up to `tol`) at desk scale.
    """

    sup_p_est: float
    sup_hat_est: float
    fock_upper_est: float
    fock_level: int
    max_identity_gap: float
    trials: int
    seed: int
    tol: float
    violations: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {
            "sup_p_est": self.sup_p_est,
            "sup_hat_est": self.sup_hat_est,
            "fock_upper_est": self.fock_upper_est,
            "fock_level": self.fock_level,
            "max_identity_gap": self.max_identity_gap,
            "trials": self.trials,
            "seed": self.seed,
            "violations": list(self.violations),
        }


def operator_norm(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix, 2))


# Cap on the truncated-shift matrix size used by the experiment; the spectral
# norm comes from a dense SVD, so this bounds its cost.
_FOCK_SIZE_BUDGET = 1500


def sup_norm_experiment(
    p: FreePoly,
    hat: HatPoly,
    basis: SuperorthoBasis,
    trials: int = 20,
    sizes: Iterable[int] = (2, 3, 4),
    seed: int = 0,
    margin: float = 0.1,
    tol: float = 1e-8,
) -> SupNormReport:
    """Sample both sides of sup ||p(X)|| = sup ||hat(U)||.

    Each trial draws X strictly inside the d-letter row ball and U strictly
    inside the generator-index row ball; the images (u(X)) are used as extra
    U samples, on which ||hat|| must reproduce ||p(X)|| exactly (the factored
    form composed with the basis map is the original polynomial).  Randomness
    is derived per trial from (seed, trial), so results do not depend on
    scheduling.
    """
    if hat.basis_fingerprint != basis.fingerprint:
        raise EvaluationError("hat polynomial references a different basis")
    d = basis.alphabet_size
    sizes = tuple(sizes)
    n_generators = len(basis.elements)

    sup_p = 0.0
    sup_hat = 0.0
    max_gap = 0.0
    violations: list[str] = []

    degree = int(p.degree) if p.terms else 0
    level = max(degree, 1)
    extra = 0
    while fock_word_count(d, level + extra + 1) <= _FOCK_SIZE_BUDGET:
        extra += 1
    level += extra
    fock = truncated_fock_shifts(d, level)
    fock_upper = operator_norm(eval_poly(p, fock))

    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        size = sizes[trial % len(sizes)]
        x = sample_row_contraction(d, size, margin, rng)
        norm_p = operator_norm(eval_poly(p, x))
        sup_p = max(sup_p, norm_p)

        images = basis_images(basis, x)
        norm_hat_at_image = operator_norm(eval_hat(hat, images))
        gap = abs(norm_p - norm_hat_at_image)
        max_gap = max(max_gap, gap)
        if gap > 1e-10 * max(1.0, norm_p):
            violations.append(
                f"trial {trial}: ||p(X)|| = {norm_p!r} but factored form gives "
                f"{norm_hat_at_image!r}"
            )
        sup_hat = max(sup_hat, norm_hat_at_image)

        if n_generators:
            u = sample_row_contraction(n_generators, size, margin, rng)
            sup_hat = max(sup_hat, operator_norm(eval_hat(hat, u)))

    if sup_hat > fock_upper + tol:
        violations.append(
            f"sampled factored-side norm {sup_hat!r} exceeds the shift-operator "
            f"estimate {fock_upper!r}"
        )
    return SupNormReport(
        sup_p_est=sup_p,
        sup_hat_est=sup_hat,
        fock_upper_est=fock_upper,
        fock_level=level,
        max_identity_gap=max_gap,
        trials=trials,
        seed=seed,
        tol=tol,
        violations=tuple(violations),
    )
