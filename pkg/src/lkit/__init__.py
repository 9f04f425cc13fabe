"""Linear Hodge-Riemann toolkit: forms on C^n, Lefschetz operators, and positivity cones."""
from .exterior import (
    Bidegree,
    Form,
    FormParseError,
    conjugate,
    from_differentials,
    is_real,
    kahler_power,
    monomial,
    parse,
    serialize,
    wedge,
)
from .operators import (
    classical_lefschetz_decompose,
    gram_Q,
    min_singular_value,
    primitive_basis,
    signature,
    top_scalar,
    wedge_operator,
)
from .paths import DeformationPath, affine_path, kahler_tuple_path
from .hodge_riemann import (
    HRCertificate,
    certify_path,
    check_primitive_positivity,
    check_star_at,
    estimate_constants,
    hr_decompose,
    is_hodge_riemann,
    lemma_prim_witness,
    signature_table,
    verify_kernel_inclusion,
    verify_partial_answer,
)
from .cones import (
    GriffithsMatrix,
    KahlerForm,
    form_determinant,
    griffiths_positivity,
    sample_kahler,
    sample_positive_form,
    strict_positivity_check,
    timorin_product,
)

__version__ = "0.1.0"

__all__ = [
    "Bidegree",
    "Form",
    "FormParseError",
    "conjugate",
    "from_differentials",
    "is_real",
    "kahler_power",
    "monomial",
    "parse",
    "serialize",
    "wedge",
    "classical_lefschetz_decompose",
    "gram_Q",
    "min_singular_value",
    "primitive_basis",
    "signature",
    "top_scalar",
    "wedge_operator",
    "HRCertificate",
    "certify_path",
    "check_primitive_positivity",
    "check_star_at",
    "estimate_constants",
    "hr_decompose",
    "is_hodge_riemann",
    "lemma_prim_witness",
    "signature_table",
    "verify_kernel_inclusion",
    "verify_partial_answer",
    "GriffithsMatrix",
    "KahlerForm",
    "form_determinant",
    "griffiths_positivity",
    "sample_kahler",
    "sample_positive_form",
    "strict_positivity_check",
    "timorin_product",
    "DeformationPath",
    "affine_path",
    "kahler_tuple_path",
]
