"""Cellular-automaton decoders for the Majorana chain."""

from .ca_core import (
    BoundaryMode,
    ChainState,
    Family,
    MIRRORED,
    PERIODIC,
    RuleSet,
    TLV_MIRRORED,
    evolve,
    step,
)
from .decoders import CorrectionMask, Syndrome

__version__ = "0.1.0"
