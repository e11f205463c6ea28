"""cclab: a laboratory for constant-cost two-party communication protocols."""

from .bits import (
    BOTTOM,
    EQ,
    GAP,
    HD,
    HD44,
    HDKK,
    BitString,
    BlockedString,
    CapacityError,
    DistanceSignature,
    GapHD,
    SetFamily,
    distance_signature,
    hamming_distance,
    slice_enumerate,
    truth,
)
from .engine import (
    CostReport,
    OracleTree,
    RandomTape,
    Session,
    SymmetricProtocol,
    estimate_error,
    oracle_answer,
    run_oracle_protocol,
    run_protocol,
)

__version__ = "0.1.0"

__all__ = [
    "BOTTOM", "EQ", "GAP", "HD", "HD44", "HDKK", "BitString", "BlockedString", "CapacityError",
    "CostReport", "DistanceSignature", "GapHD", "OracleTree", "RandomTape", "Session", "SetFamily",
    "SymmetricProtocol", "distance_signature", "estimate_error", "hamming_distance", "oracle_answer",
    "run_oracle_protocol", "run_protocol", "slice_enumerate", "truth",
]
