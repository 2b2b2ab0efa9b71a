"""freeinv: superorthogonal bases for rings of invariant free polynomials.

The package covers the full pipeline: free-polynomial arithmetic with the
word inner product (`freepoly`), finite groups and unitary representations
with the averaging projection (`groups`), generator counting via character
series (`counting`), basis construction (`basis`), factoring invariants over
the generators (`rewrite`), and numerical row-ball experiments on matrix
tuples (`evaluate`).  `cli` ties everything together behind the `freeinv`
command.
"""

from .basis import (
    BasisElement,
    BuildError,
    SuperorthoBasis,
    SuperorthoReport,
    basis_fingerprint,
    basis_from_json_dict,
    build,
    build_abelian,
    build_general,
    check_superorthogonality,
    span_distance,
)
from .counting import (
    CountingError,
    CountReport,
    closed_form,
    count_report,
    f_coefficients,
    g_from_f,
    series_coefficients,
)
from .evaluate import (
    EvaluationError,
    OperatorTuple,
    PartialRowBallReport,
    RowBallCertificate,
    SupNormReport,
    basis_images,
    check_partial_row_ball,
    eval_hat,
    eval_many,
    eval_poly,
    even_dilation,
    operator_norm,
    row_ball_certificate,
    sample_row_contraction,
    sup_norm_experiment,
    top_left_block,
    truncated_fock_shifts,
)
from .freepoly import (
    COEFF_EPS,
    FreePoly,
    HomogeneousSlice,
    ParseError,
    dense_coefficients,
    format_poly,
    parse_poly,
    word_from_index,
    word_index,
    words_of_degree,
)
from .groups import (
    Character,
    FiniteGroup,
    GroupError,
    UnitaryRep,
    cyclic_group,
    dihedral_group,
    make_group,
    symmetric_group,
    trivial_group,
)
from .rewrite import HatPoly, RewriteError, expand, rewrite

__version__ = "0.1.0"

__all__ = [
    "BasisElement",
    "BuildError",
    "COEFF_EPS",
    "Character",
    "CountReport",
    "CountingError",
    "EvaluationError",
    "FiniteGroup",
    "FreePoly",
    "GroupError",
    "HatPoly",
    "HomogeneousSlice",
    "OperatorTuple",
    "ParseError",
    "PartialRowBallReport",
    "RewriteError",
    "RowBallCertificate",
    "SupNormReport",
    "SuperorthoBasis",
    "SuperorthoReport",
    "basis_fingerprint",
    "basis_from_json_dict",
    "basis_images",
    "build",
    "build_abelian",
    "build_general",
    "check_partial_row_ball",
    "check_superorthogonality",
    "closed_form",
    "count_report",
    "cyclic_group",
    "dense_coefficients",
    "dihedral_group",
    "eval_hat",
    "eval_many",
    "eval_poly",
    "even_dilation",
    "expand",
    "f_coefficients",
    "format_poly",
    "g_from_f",
    "make_group",
    "operator_norm",
    "parse_poly",
    "rewrite",
    "row_ball_certificate",
    "sample_row_contraction",
    "series_coefficients",
    "span_distance",
    "sup_norm_experiment",
    "symmetric_group",
    "top_left_block",
    "trivial_group",
    "truncated_fock_shifts",
    "word_from_index",
    "word_index",
    "words_of_degree",
]
