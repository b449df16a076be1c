"""Exception hierarchy.

Every exception carries an ``exit_code`` so the CLI can map failures without
a lookup table: 2 for verification failures, 3 for recoverable errors that a
change of base field can fix, 4 for malformed input.
"""


class CremonaError(Exception):
    exit_code = 4


class InputError(CremonaError):
    """Malformed or inconsistent input (field mismatch, bad degree, ...)."""

    exit_code = 4


class FieldMismatch(InputError):
    pass


class NonDivisible(CremonaError):
    exit_code = 2

    def __init__(self, remainder, message="exact division failed"):
        super().__init__(message)
        self.remainder = remainder


class SingularMatrix(InputError):
    pass


class NotDegree3(InputError):
    pass


class PointNotOnCurve(InputError):
    pass


class GeneratorOffCurve(PointNotOnCurve):
    pass


class DuplicateGenerator(InputError):
    pass


class Singular(CremonaError):
    exit_code = 2

    def __init__(self, message, witness=None, certificate=None):
        super().__init__(message)
        self.witness = witness
        self.certificate = certificate


class Reducible(CremonaError):
    exit_code = 2

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class QuarticNotSplit(CremonaError):
    exit_code = 3

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class BasePointsNotRational(CremonaError):
    exit_code = 3

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class DegreeMismatch(InputError):
    pass


class ZeroMap(InputError):
    pass


class ComposedToZero(CremonaError):
    exit_code = 2


class NotInInertia(CremonaError):
    exit_code = 2


class NotBirational(CremonaError):
    exit_code = 2

    def __init__(self, message, determinant=None):
        super().__init__(message)
        self.determinant = determinant


class NormalizationViolated(InputError):
    pass


class WrongMultiplicity(InputError):
    pass


class DegenerateConfiguration(CremonaError):
    exit_code = 2


class VerificationFailure(CremonaError):
    """A postcondition that should hold by construction did not."""

    exit_code = 2


class NotAGenerator(InputError):
    pass


class UnknownId(InputError):
    pass


class NotInSuccRelation(InputError):
    pass


class WordNotReduced(InputError):
    pass


class RecursionMismatch(VerificationFailure):
    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details


class AssertionFailure(VerificationFailure):
    def __init__(self, message, word=None, failures=None):
        super().__init__(message)
        self.word = word
        self.failures = failures
