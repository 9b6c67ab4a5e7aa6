"""Exception types for the fuzzy inference engine."""


class RuleBaseError(ValueError):
    """Rule base configuration problem: bad schema, unknown names, missing
    inputs at inference time, or an incomplete rule cover."""


class DegenerateSetError(ArithmeticError):
    """The aggregated output set is identically zero, so no centroid exists.

    This means no rule fired for the given inputs; a complete rule base
    makes it unreachable, so it signals a configuration bug rather than a
    neutral result.
    """
