"""Exception types shared across the package."""


class SpecterError(Exception):
    """Base class for every error this package raises on purpose."""


# Automaton construction and queries.

class DanglingEndpoint(SpecterError):
    """A transition references a state or event outside the automaton."""


class MissingCost(SpecterError):
    """An event has no cost entry."""


class NonPositiveCost(SpecterError):
    """A cost entry is zero or negative."""


class DuplicateEventEndpoints(SpecterError):
    """One event labels transitions with two different endpoint patterns."""


class UnknownState(SpecterError):
    """A state was referenced that the automaton does not contain."""


class LengthMismatch(SpecterError):
    """A projector and a state tuple disagree in length."""


class NoSuchTransition(SpecterError):
    """No transition matches the requested (state, event) pair."""


# Algebra over compatible automata.

class Incompatible(SpecterError):
    """Operands share events whose endpoints disagree."""


class CostConflict(SpecterError):
    """Operands share an event but assign it different costs."""


class ArityMismatch(SpecterError):
    """Operands carry different slot layouts."""


class EventCollision(SpecterError):
    """Concatenation operands share an event identifier."""


class SlotCollision(SpecterError):
    """Slot names are not unique where they must be."""


# Model composition.

class UnknownAgent(SpecterError):
    """An agent id does not name a slot of the environment model."""


class LiftError(SpecterError):
    """An inter-agent automaton references states outside the agents' alphabets."""


# Planning.

class NoPath(SpecterError):
    """The target state is unreachable from the source."""


class TaskInfeasible(SpecterError):
    """Every goal state is unreachable from the initial state."""


class NoGoalStates(SpecterError):
    """No marked state projects onto the requested target."""


class NoSuchGoal(SpecterError):
    """The heuristic goal state does not exist or is not marked."""


class BrokenPath(SpecterError):
    """A path contains a consecutive pair with no edge between them."""


# Test oracle.

class BoundExceeded(SpecterError):
    """The model is larger than the oracle's configured bound."""


# Scenario and artifact IO.

class ExpansionBlowup(SpecterError):
    """Template expansion would generate more events than the configured cap."""


class ScenarioError(SpecterError):
    """A scenario document failed to parse or validate.

    Carries the full diagnostic list; ``str()`` renders a summary.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics[:5])
        more = "" if len(self.diagnostics) <= 5 else f" (+{len(self.diagnostics) - 5} more)"
        super().__init__(f"{len(self.diagnostics)} problem(s): {lines}{more}")


class ArtifactError(SpecterError):
    """A model or plan artifact is unreadable or has the wrong version."""
