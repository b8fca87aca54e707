"""Staged confirmation pipeline shared by table and map artifacts."""

from __future__ import annotations

from enum import IntEnum

from .errors import InvalidStage


class TableStage(IntEnum):
    DETECTED = 0
    REGION_CONFIRMED = 1
    STRUCTURE_PROPOSED = 2
    STRUCTURE_CONFIRMED = 3
    CONTENT_PROPOSED = 4
    CONTENT_CONFIRMED = 5


class MapStage(IntEnum):
    DETECTED = 0
    REGION_CONFIRMED = 1
    GRID_PROPOSED = 2
    GRID_CONFIRMED = 3
    MARKING = 4


def require_stage(current: IntEnum, *allowed: IntEnum):
    if current not in allowed:
        names = ", ".join(s.name for s in allowed)
        raise InvalidStage(f"operation requires stage {names}, artifact is at {current.name}")


def advance(current: IntEnum, expected: IntEnum):
    """Return the next stage; transitions move forward exactly one step."""
    require_stage(current, expected)
    if int(current) + 1 >= len(type(current)):
        raise InvalidStage(f"{current.name} is the final stage")
    return type(current)(int(current) + 1)


def check_revert(current: IntEnum, target: IntEnum):
    """Reverts may land on any strictly earlier stage."""
    if int(target) >= int(current):
        raise InvalidStage(
            f"revert target {target.name} is not earlier than {current.name}")
