"""Key-rate engine for sending-or-not-sending twin-field QKD with
redundant-space post-selection."""

from ._snsrs import (  # noqa: F401
    ChannelParams,
    Config,
    KeyRateResult,
    OptResult,
    ProtocolParams,
    SecurityParams,
    __version__,
    binary_entropy,
    compare_simulation,
    evaluate,
    optimize_rate,
    parse_config,
    per_arm_transmittance,
    plob_bound,
    serialize_config,
    simulate,
    validate,
)

__all__ = [
    "ChannelParams",
    "Config",
    "KeyRateResult",
    "OptResult",
    "ProtocolParams",
    "SecurityParams",
    "__version__",
    "binary_entropy",
    "compare_simulation",
    "evaluate",
    "optimize_rate",
    "parse_config",
    "per_arm_transmittance",
    "plob_bound",
    "serialize_config",
    "simulate",
    "validate",
]
