"""Exception types shared across the toolkit."""


class NidsLabError(Exception):
    """Base class for all toolkit errors."""


class MalformedPcap(NidsLabError):
    """Input bytes are not a usable classic pcap capture."""


class EmptyTrace(NidsLabError):
    """Operation requires at least one packet."""


class LayoutMismatch(NidsLabError):
    """Meta-info vector layout does not match the trace it is applied to."""


class BudgetViolation(NidsLabError):
    """Mutated traffic exceeds the crafted-packet or elapsed-time budget."""


class InapplicableRecipe(NidsLabError):
    """Crafted-packet recipe cannot be applied to the given anchor packet."""


class TimeRegression(NidsLabError):
    """Observation timestamps went backwards beyond tolerance."""


class DimensionMismatch(NidsLabError):
    """Feature dimensionality differs from what a model was trained on."""


class EmptyTraining(NidsLabError):
    """Model training received no data."""


class ShapeMismatch(NidsLabError):
    """Network input width does not match the provided vectors."""


class EmptyResult(NidsLabError):
    """No generated feature passed the adversarial filter."""


class ZeroPositives(NidsLabError):
    """Evasion rates are undefined when nothing was detected originally."""


class NoValidPairs(NidsLabError):
    """All feature pairs were skipped; the ratio metric is undefined."""


class TooFewValidSamples(NidsLabError):
    """Correlation test kept fewer valid sample points than required."""


class ConfigError(NidsLabError):
    """Experiment configuration is invalid."""
