"""Exception hierarchy shared across the package.

Every error carries a stable machine-readable ``code`` so that transport
layers (HTTP API, CLI exit paths) can map failures without matching on
message text.
"""

from __future__ import annotations

from typing import Any


class HorizonError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"

    def __init__(self, message: str, *, detail: dict[str, Any] | None = None):
        super().__init__(message)
        self.detail = detail or {}


class FrameDefinitionError(HorizonError):
    code = "invalid_frame"


class DuplicateLabelError(FrameDefinitionError):
    code = "duplicate_label"


class UnknownLabelError(HorizonError):
    code = "unknown_label"


class UnknownFrameError(HorizonError):
    code = "unknown_frame"


class FrameMismatchError(HorizonError):
    code = "frame_mismatch"


class EmptyFocalSetError(HorizonError):
    code = "empty_focal_set"


class InvalidMassError(HorizonError):
    code = "invalid_mass"


class MassSumExceededError(HorizonError):
    code = "mass_sum_exceeded"


class InvalidRateError(HorizonError):
    code = "invalid_rate"


class OpenWorldInputError(HorizonError):
    """An operation that requires a closed-world body was given one carrying
    mass on the empty set."""

    code = "open_world_input"


class DuplicateRelationError(HorizonError):
    code = "duplicate_relation"


class PairNotFoundError(HorizonError):
    code = "pair_not_found"


class UnreachableFrameError(HorizonError):
    code = "unreachable_frame"


class TotalConflictError(HorizonError):
    """All product mass fell on the empty set; Dempster normalization is
    undefined."""

    code = "total_conflict"


class ResourceLimitError(HorizonError):
    code = "resource_limit"


class FrameTooLargeError(HorizonError):
    """Exact subset-lattice enumeration was requested on a frame above the
    configured cap."""

    code = "frame_too_large"


class NotEnoughInputsError(HorizonError):
    code = "not_enough_inputs"


class UnknownNodeError(HorizonError):
    code = "unknown_node"


class NodeStateError(HorizonError):
    """The node exists but is not in a state the operation accepts."""

    code = "invalid_node_state"


class KbValidationError(HorizonError):
    code = "invalid_kb"


class KbParseError(KbValidationError):
    code = "kb_parse_error"


class SessionFormatError(HorizonError):
    code = "invalid_session"


class ReplayMismatchError(HorizonError):
    """Replaying a session log did not reproduce the recorded node values."""

    code = "replay_mismatch"


class InvalidRequestError(HorizonError):
    code = "invalid_request"
