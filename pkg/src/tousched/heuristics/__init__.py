from .ch import block_shift, ch_j
from .convert import ConversionError, convert_schedule
from .eps import (EpsIndex, EpsKind, EpsRecord, build_index, evaluate_eps_move, find_eps, move_is_pruned,
                  touched_range, update_eps)
from .es import MoveEvent, exchange_search
from .sgh import cheapest_locations, make_rng, sgh
from .sgs import sgs, sgs_es
from .timeline import MachineTimeline, timelines_from_schedule

__all__ = [
    "ConversionError", "EpsIndex", "EpsKind", "EpsRecord", "MachineTimeline", "MoveEvent",
    "block_shift", "build_index", "ch_j", "cheapest_locations", "convert_schedule",
    "evaluate_eps_move", "exchange_search", "find_eps", "make_rng", "move_is_pruned", "sgh", "sgs",
    "sgs_es", "timelines_from_schedule", "touched_range", "update_eps",
]
