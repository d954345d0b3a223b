"""Global analytic hypoellipticity of d_t + c(t) d_0 + q on T^1 x S^3."""

from .engine import Verdict, check_c1_c2, cross_check_relation, decide, gah_constant, gah_variable
from .numbers import ComplexParam, RealParam
from .operators import OperatorSpec
from .torus import TrigPoly

__all__ = ["ComplexParam", "OperatorSpec", "RealParam", "TrigPoly", "Verdict", "check_c1_c2",
           "cross_check_relation", "decide", "gah_constant", "gah_variable"]
__version__ = "0.1.0"
