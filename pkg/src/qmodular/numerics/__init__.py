"""Arbitrary-precision evaluation, quadratic forms, singular values, 1/pi series."""

from qmodular.numerics.bigcomplex import BigComplex
from qmodular.numerics.evaluate import Certified, PrecisionError, X_value, eta_value, eval_qseries
from qmodular.numerics.pi import chudnovsky_pi
from qmodular.numerics.quadform import QuadForm, class_group_enumerate, reduce_form
from qmodular.numerics.surd import Radical, Surd, parse_radical, parse_surd

__all__ = [
    "BigComplex", "Certified", "PrecisionError", "X_value", "eta_value", "eval_qseries",
    "chudnovsky_pi", "QuadForm", "class_group_enumerate", "reduce_form",
    "Radical", "Surd", "parse_radical", "parse_surd",
]
