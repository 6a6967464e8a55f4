"""Exception types shared across the package."""


class WsnTopoError(Exception):
    """Base class for all wsntopo errors."""


class ConfigError(WsnTopoError, ValueError):
    """Invalid configuration or parameter combination."""


class NodeLookupError(WsnTopoError, LookupError):
    """Node id outside the deployment."""


class SeedTopologyError(WsnTopoError, RuntimeError):
    """The initial topology around the sink cannot be built with these parameters."""


class GrowthExhausted(WsnTopoError):
    """No in-topology node has an attachable scattered neighbor left.

    This is a termination signal, not a failure: evolution simply stops and
    whatever is still scattered is reported as unreached.
    """


class StateError(WsnTopoError, RuntimeError):
    """Operation applied to an evolution state it does not fit."""


class ElectionError(WsnTopoError, RuntimeError):
    """Cluster-head election produced no heads after the retry budget."""


class AnalysisError(WsnTopoError, ValueError):
    """Analysis requested on unsuitable input (empty graph, out-of-domain k, ...)."""


class FitError(WsnTopoError, ValueError):
    """Exponent fit is impossible on the given sample."""

    def __init__(self, message: str, sample_count: int = 0):
        super().__init__(message)
        self.sample_count = sample_count
