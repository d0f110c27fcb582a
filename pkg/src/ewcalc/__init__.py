"""ewcalc: exact coend/end calculus and Eilenberg-Watts functors over F_p.

Finite linear categories are realized as module categories of
finite-dimensional algebras, finite tensor categories as module categories
of finite-dimensional Hopf algebras, and the calculus of left/right exact
functors between them (represented functors, coends and ends, balancings,
twisted centers, central (co)monads) is carried out in exact arithmetic
over a prime field.
"""

__version__ = "0.1.0"

from .linalg import DEFAULT_PRIME, Field, Matrix

__all__ = ["DEFAULT_PRIME", "Field", "Matrix", "__version__"]
