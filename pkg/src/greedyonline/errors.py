"""Exception types shared across the package."""


class GreedyOnlineError(Exception):
    """Base class for all package errors."""


class BadSimplexPoint(GreedyOnlineError):
    """Weights cannot be normalized into a probability distribution."""


class InfeasibleTheta(GreedyOnlineError):
    """An offline local optimizer returned a parameter with negative payoff
    beyond tolerance; signals broken application code."""


class SaddleValuePositive(GreedyOnlineError):
    """Certified saddle value of the halfspace response LP exceeds tolerance;
    the marginal-polytope relaxation assumption failed."""


class LpInfeasible(GreedyOnlineError):
    """The bi-greedy feasibility LP has no solution; signals a non-submodular
    input function."""


class FeedWithoutExplore(GreedyOnlineError):
    """Bandit feedback was supplied on a round with no exploration."""


class BanditContractViolation(GreedyOnlineError):
    """The bandit value oracle was queried more than once in a single round."""


class TooLargeToEnumerate(GreedyOnlineError):
    """Brute-force benchmark requested on an instance above enumerability limits."""


class DegenerateFit(GreedyOnlineError):
    """Not enough points to fit a log-log slope."""


class BadParams(GreedyOnlineError):
    """Application parameters out of range."""


class ConfigError(GreedyOnlineError):
    """Malformed or inconsistent experiment configuration."""
