"""Design of dual-polarized planar arrays for line-of-sight MIMO links."""

from .channel import (
    ChannelMatrix,
    FixedGain,
    Isotropic,
    PerPairGain,
    WavelengthPowerGain,
    XpdModel,
    dual_pol,
    exact_single_pol,
    fresnel_single_pol,
)
from .eigencap import capacity, channel_capacity, gram_eigenvalues, waterfill
from .errors import ConfigError, ConvergenceError, DomainError, LosMimoError
from .geometry import LinkGeometry, SpacingSplit, UraSpec

__version__ = "0.1.0"

__all__ = [
    "ChannelMatrix",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "FixedGain",
    "Isotropic",
    "LinkGeometry",
    "LosMimoError",
    "PerPairGain",
    "SpacingSplit",
    "UraSpec",
    "WavelengthPowerGain",
    "XpdModel",
    "capacity",
    "channel_capacity",
    "dual_pol",
    "exact_single_pol",
    "fresnel_single_pol",
    "gram_eigenvalues",
    "waterfill",
]
