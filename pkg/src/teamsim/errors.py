"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TeamSimError(Exception):
    """Base class for all package-specific errors."""


# --- scenario documents ---------------------------------------------------


class ScenarioSyntaxError(TeamSimError):
    """Malformed scenario document (bad markup, wrong value shape)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ScenarioSemanticError(TeamSimError):
    """Well-formed document that violates a scenario invariant."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


# --- world -----------------------------------------------------------------


class InsufficientArea(TeamSimError):
    """Requested region count cannot fit at the minimum region size."""


class CellNotOpen(TeamSimError):
    """A pathfinding endpoint is a wall or out of bounds."""


class NoRoute(TeamSimError):
    """Target region is unreachable from the given cell."""


class UnknownRegion(TeamSimError):
    """A region hint names no generated region."""


class NoFreeCell(TeamSimError):
    """No admissible cell remains for a blocking entity placement."""


class IllegalChange(TeamSimError):
    """A world change would violate a world invariant (engine bug)."""


# --- engine / agents --------------------------------------------------------


class UnknownAgent(TeamSimError):
    """Named agent does not exist in the world."""


class ParticipantBusy(TeamSimError):
    """Agent scheduled into two unresolved events (decision-loop bug)."""


class PolicyFailure(TeamSimError):
    """A decision policy errored or produced an unusable reply."""


class NoTargets(TeamSimError):
    """Conversation started with an empty target list."""


# --- logs -------------------------------------------------------------------


class MalformedLog(TeamSimError):
    """Run log fails an integrity check (gaps, bad ordering)."""


class VersionMismatch(TeamSimError):
    """Document format version is not supported by this build."""


# --- model backends ----------------------------------------------------------


class AdapterError(TeamSimError):
    """Backend adapter failed."""


class AdapterTimeout(AdapterError):
    """Backend call exceeded its per-call timeout."""


class AdapterUnavailable(AdapterError):
    """Circuit is open; backend temporarily not called."""


class CassetteMiss(AdapterError):
    """Strict replay found no recorded reply for the request."""
