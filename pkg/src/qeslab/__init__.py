"""qeslab: exact SL(2)-operator algebra for quasi-exactly-solvable radial
Hamiltonians, the dual power-law potential transformation, and an independent
numerical radial Schrödinger eigensolver.

The scalar layer works with exact rationals and switches to multiprecision
reals only when irrational values (square roots of couplings) enter.  The
working real precision is taken from the environment variable
``QESLAB_PRECISION`` (mantissa bits, default 64, never less than 64).
"""

import os

from mpmath import mp

__version__ = "0.1.0"

mp.prec = max(int(os.environ.get("QESLAB_PRECISION", "64")), 64)

from .errors import QeslabError  # noqa: E402,F401
from .algebra import PowerSum, RationalPoly  # noqa: E402,F401
from .sl2rep import SpinLabel, verify_algebra  # noqa: E402,F401
from .qes import (  # noqa: E402,F401
    GeneratorCoefficients,
    algebraic_spectrum,
    assemble,
    coordinate_map,
    gauge_data,
)
from .duality import dual_exponent, enumerate_integer_duals, sl2_admissible  # noqa: E402,F401
from .radial import make_problem, solve_radial, verify_duality  # noqa: E402,F401
