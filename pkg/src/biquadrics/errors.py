"""Exception taxonomy shared across the library.

Every domain error derives from BiquadricsError so callers (and the CLI)
can map failures to coarse categories: bad input, degenerate geometry,
numerical failure / exhausted budget.
"""


class BiquadricsError(Exception):
    """Base class for all library errors."""


class InvalidInput(BiquadricsError):
    """Malformed or out-of-contract input."""


class DegenerateGeometry(BiquadricsError):
    """Geometrically degenerate configuration (tangency, reducibility, ...)."""


class NumericalFailure(BiquadricsError):
    """Numerical failure, unreachable accuracy, or exhausted budget."""


# -- polynomial layer -------------------------------------------------------

class MixedBackend(InvalidInput):
    """Exact-rational and floating scalars mixed in one operation."""


class DegreeMismatch(InvalidInput):
    pass


class ZeroAtOrigin(InvalidInput):
    pass


class NonSquareLeading(InvalidInput):
    """Exact square-root series needs a perfect-square leading coefficient."""


class DegenerateMobius(InvalidInput):
    pass


class DivisionByZeroFn(InvalidInput):
    pass


# -- elliptic layer ----------------------------------------------------------

class SingularModulus(InvalidInput):
    pass


class NoSolution(NumericalFailure):
    pass


class DegenerateLattice(DegenerateGeometry):
    pass


class LatticePole(NumericalFailure):
    """Evaluation point too close to a lattice pole."""


# -- curve layer -------------------------------------------------------------

class DegenerateDelta(DegenerateGeometry):
    pass


class NotCanonical(InvalidInput):
    pass


class DegenerateQuartic(DegenerateGeometry):
    pass


class EmptyRealCurve(DegenerateGeometry):
    pass


class ModulusOutOfRange(DegenerateGeometry):
    pass


class NotOnCurve(InvalidInput):
    pass


class AmbiguousBranch(NumericalFailure):
    pass


class CaseNotCovered(InvalidInput):
    pass


# -- dynamics ----------------------------------------------------------------

class LeftCurve(NumericalFailure):
    """Orbit residual blew up; iteration left the curve."""


class UnboundedUnparameterized(InvalidInput):
    pass


# -- conics ------------------------------------------------------------------

class EmptyRealConic(DegenerateGeometry):
    pass


class DegenerateBridge(DegenerateGeometry):
    pass


class NegativeMixedProduct(DegenerateGeometry):
    """No smooth solution of r x r' = b; flipping the sign of b may help."""


class NonconstantMixedProduct(DegenerateGeometry):
    pass


class TangencyDegenerate(DegenerateGeometry):
    pass


class NoRealIntersection(DegenerateGeometry):
    pass


class InvalidGeometry(InvalidInput):
    pass


# -- polynomial Pell ---------------------------------------------------------

class PerfectSquareR(InvalidInput):
    pass


class BudgetExhausted(NumericalFailure):
    """No solution found within the degree budget ("not solvable within bound")."""


class NoRealRoot(InvalidInput):
    pass


class IntegrandSingular(InvalidInput):
    pass


# -- separated solutions -----------------------------------------------------

class SymbolicOverflow(NumericalFailure):
    pass


class NotCertifiedPeriodic(InvalidInput):
    pass


class PoleOnCurve(DegenerateGeometry):
    pass


# -- physics -----------------------------------------------------------------

class ModeBoundary(InvalidInput):
    pass


class NoSolutionInMode(NumericalFailure):
    pass


class RankDeficientFit(NumericalFailure):
    pass
