"""Exception hierarchy.

Unification failure is never an exception: operations that can fail on a
type clash return ``None``.  Exceptions are reserved for malformed input.
"""


class GrammarError(Exception):
    """Base class for every error raised while loading or compiling."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class GrammarSyntaxError(GrammarError):
    pass


# signature errors

class SignatureError(GrammarError):
    pass


class CycleInHierarchy(SignatureError):
    pass


class MissingRoot(SignatureError):
    pass


class NonUniqueGLB(SignatureError):
    def __init__(self, t1, t2, candidates):
        self.pair = (t1, t2)
        self.candidates = tuple(candidates)
        super().__init__(
            f"types {t1} and {t2} have no unique greatest common subtype "
            f"(maximal common subtypes: {', '.join(self.candidates)})"
        )


class FeatureIntroductionViolation(SignatureError):
    pass


class NonMonotonicApprop(SignatureError):
    pass


class UnknownType(GrammarError):
    pass


class UnknownFeature(GrammarError):
    pass


class UnknownTypeInDescription(UnknownType):
    pass


class FeatureNotAppropriate(GrammarError):
    pass


class DisjunctLimitExceeded(GrammarError):
    pass


class InconsistentConstraint(GrammarError):
    pass
