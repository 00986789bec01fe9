"""Multi-server coded caching simulator for the small-cache regime.

Coded placement fills each user's cache with a sum of subfiles; delivery
zero-forces per-row payloads so that one transmission serves many users,
achieving the analytic optimum delivery time in both antenna regimes.
"""

from .channel import (
    ChannelMatrix,
    DecodeResult,
    ReceptionLog,
    decode_all,
    decode_user,
    draw_channel,
    receive,
)
from .content import (
    CacheContent,
    DemandVector,
    Library,
    LibraryConfig,
    MinifileView,
    SubfileView,
    load_library,
    place_caches,
    random_library,
    save_library,
    split_file,
    split_subfile,
)
from .delivery import (
    DeliverySchedule,
    RowCodePlan,
    TransmitBlock,
    Transmission,
    build_block_from_plan,
    build_block_full_antennas,
    build_row_plan_reduced,
    build_schedule,
    is_supported,
    regime,
    render_delivery_table,
    segment_sizes,
    verify_row_plan,
)
from .errors import (
    DegenerateChannel,
    DimensionMismatch,
    InconsistentInputs,
    IndivisibleFile,
    PlanVerificationError,
    ResamplingExhausted,
    SimulatorError,
    WrongRegime,
)
from .field import ComplexField, FieldContext, PrimeField, make_field
from .linalg import invert, nullspace_basis, rank, solve, zero_forcing_vector
from .metrics import (
    CSV_HEADER,
    MetricsReport,
    achievable_time,
    assemble_report,
    converse_bound,
    uncoded_baseline,
)

__version__ = "0.1.0"

__all__ = [
    "CacheContent",
    "ChannelMatrix",
    "ComplexField",
    "CSV_HEADER",
    "DecodeResult",
    "DegenerateChannel",
    "DeliverySchedule",
    "DemandVector",
    "DimensionMismatch",
    "FieldContext",
    "InconsistentInputs",
    "IndivisibleFile",
    "Library",
    "LibraryConfig",
    "MetricsReport",
    "MinifileView",
    "PlanVerificationError",
    "PrimeField",
    "ReceptionLog",
    "ResamplingExhausted",
    "RowCodePlan",
    "SimulatorError",
    "SubfileView",
    "Transmission",
    "TransmitBlock",
    "WrongRegime",
    "achievable_time",
    "assemble_report",
    "build_block_from_plan",
    "build_block_full_antennas",
    "build_row_plan_reduced",
    "build_schedule",
    "converse_bound",
    "decode_all",
    "decode_user",
    "draw_channel",
    "invert",
    "is_supported",
    "load_library",
    "make_field",
    "nullspace_basis",
    "place_caches",
    "random_library",
    "rank",
    "receive",
    "regime",
    "render_delivery_table",
    "save_library",
    "segment_sizes",
    "solve",
    "split_file",
    "split_subfile",
    "uncoded_baseline",
    "verify_row_plan",
    "zero_forcing_vector",
]
