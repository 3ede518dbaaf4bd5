"""Exception hierarchy.

Every error raised by the package derives from :class:`TableError`, which is a
``ValueError``.  Each class carries a short machine-readable ``reason`` used
when a degenerate measure is rendered as ``NA:<reason>``.
"""


class TableError(ValueError):
    reason = "error"


class NegativeEntry(TableError):
    reason = "negative_entry"


class ZeroTable(TableError):
    reason = "zero_table"


class NonPositiveScale(TableError):
    reason = "non_positive_scale"


class DegenerateTable(TableError):
    reason = "degenerate_table"


class InfeasibleD(TableError):
    reason = "infeasible_d"


class NoValidRoot(TableError):
    reason = "no_valid_root"


class UndefinedOdds(TableError):
    reason = "undefined_odds"


class UndefinedRatio(TableError):
    reason = "undefined_ratio"


class DegenerateMarginal(TableError):
    reason = "degenerate_marginal"


class NonPositiveLambda(TableError):
    reason = "non_positive_lambda"


class EmptyData(TableError):
    reason = "empty_data"


class TooFewDraws(TableError):
    reason = "too_few_draws"


class InvalidLevel(TableError):
    reason = "invalid_level"


class TooFewPairs(TableError):
    reason = "too_few_pairs"


class NonPositiveExpected(TableError):
    reason = "non_positive_expected"


class ParseError(TableError):
    """Malformed input file; ``line`` is 1-based."""

    reason = "parse_error"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NegativeCount(ParseError):
    reason = "negative_count"
