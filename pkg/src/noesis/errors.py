"""Exception hierarchy shared across the package."""


class NoesisError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMindError(NoesisError):
    """A mind (or concept space) violates a construction invariant."""


class UnknownConceptError(NoesisError, KeyError):
    """A concept label or signal token is not part of the declared universe."""

    def __str__(self) -> str:  # KeyError quotes its arg; keep the plain message
        return Exception.__str__(self)


class UnreachableConceptError(NoesisError):
    """The requested concept lies outside the understanding horizon."""


class ClosureAxiomError(NoesisError):
    """A user-supplied closure oracle violates extension, monotonicity, or idempotence."""


class NotLearningSpaceError(NoesisError):
    """A state family fails the axiom-floor, accessibility, or union-closure check."""


class ScenarioError(NoesisError):
    """A teaching scenario violates one of its invariants."""


class StrategyError(NoesisError):
    """A teaching strategy is ill-formed or exhausted at the queried round."""


class MissingSignalError(NoesisError):
    """No raw signal targets a concept that a strategy must teach."""


class ZeroProbabilityError(NoesisError):
    """A conditioning event has probability zero under the scenario and strategy."""


class InformationLawError(NoesisError):
    """Two routes to the same information quantity disagree beyond tolerance."""


class CapExceededError(NoesisError):
    """An enumeration or search grew past its configured cap."""


class FormatError(NoesisError):
    """A scenario, mind, or trace file cannot be parsed or fails validation."""
