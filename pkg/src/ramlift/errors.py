"""Exception hierarchy shared by all ramlift modules."""


class RamliftError(Exception):
    """Base class for every error raised by this package."""


# signatures
class SignatureError(RamliftError, ValueError):
    pass


class MalformedInput(SignatureError):
    pass


class PropertyOneViolation(SignatureError):
    def __init__(self, even_count):
        self.even_count = even_count
        super().__init__(
            f"property (1) violated: {even_count} vertex labels are even, expected an even number"
        )


class PropertyTwoViolation(SignatureError):
    def __init__(self, index):
        # 1-based vertex index, matching the usual s_1..s_d labelling
        self.index = index
        super().__init__(
            f"property (2) violated at vertex {index}: edge labels around it do not match its parity"
        )


class DimensionMismatch(RamliftError, ValueError):
    pass


class NotInHashStabilizer(RamliftError, ValueError):
    pass


# BS(1,n)
class MalformedWord(RamliftError, ValueError):
    pass


class ParameterMismatch(RamliftError, ValueError):
    pass


# exact polynomials
class DivisionByZeroPolynomial(RamliftError, ZeroDivisionError):
    pass


class ZeroPolynomial(RamliftError, ValueError):
    pass


class IndeterminateForm(RamliftError, ArithmeticError):
    pass


# covers
class ConstructionFailed(RamliftError):
    def __init__(self, message, trace=()):
        self.trace = list(trace)
        super().__init__(message)


class UncertifiedCover(RamliftError):
    pass


class BasePointNotFixed(RamliftError, ValueError):
    pass


# lifts
class NotAdmissible(RamliftError, ValueError):
    pass


class BracketingFailed(RamliftError, ArithmeticError):
    pass


class HomConstraintViolated(RamliftError, ValueError):
    pass


class OrientationReversing(RamliftError, ValueError):
    pass


class OutOfDomain(RamliftError, ValueError):
    pass


class ChartUnavailable(RamliftError):
    pass


# classifier
class NotAGroup(RamliftError, ValueError):
    pass


class MismatchDetected(RamliftError):
    def __init__(self, expected, got, witness=None):
        self.expected = expected
        self.got = got
        self.witness = witness
        super().__init__(f"class count mismatch: oracle {expected}, enumeration {got}; witness {witness}")
