"""Proof nets for symmetric monoidal closed theories, example binding
calculi, binding bigraphs, and the translation from bigraphs into nets."""

from .formula import (
    Atom,
    Formula,
    Lollipop,
    ParseError,
    Polarity,
    Port,
    Sort,
    Tensor,
    Unit,
    UNIT,
    classicalize,
    format_formula,
    parse_formula,
    polarity,
)
from .signature import (
    Equation,
    SignatureMorphism,
    SmcSignature,
    Theory,
    TheoryError,
    apply_signature_morphism,
    make_signature,
    validate_theory,
)
from .net import (
    Net,
    NetError,
    PortRef,
    check_wellformed,
    cod_port,
    correctness_report,
    dom_port,
    cell_dom_port,
    cell_cod_port,
    global_polarity,
    is_correct,
    net_to_dot,
    switching_count,
    switchings,
)

__version__ = "0.1.0"
