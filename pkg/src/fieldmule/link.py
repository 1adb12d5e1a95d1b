"""Radio propagation and airtime model.

Range behavior is calibrated to two measured anchors: ~1 km with a clear
line of sight and ~250 m with the antenna down in the vegetation.  The
success model is a hard step by default, with an optional linear rolloff
band for probabilistic studies.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

SPEED_OF_LIGHT_M_S = 299_792_458.0
DEFAULT_FREQUENCY_HZ = 915e6
DEFAULT_WAVELENGTH_M = SPEED_OF_LIGHT_M_S / DEFAULT_FREQUENCY_HZ  # ~0.3276 m


@dataclass(frozen=True)
class LinkGeometry:
    wavelength_m: float = DEFAULT_WAVELENGTH_M
    d1_m: float = 0.0
    d2_m: float = 0.0

    def __post_init__(self):
        if self.d1_m < 0 or self.d2_m < 0:
            raise ValueError("distances must be >= 0")


def fresnel_radius(geom: LinkGeometry) -> float:
    """First Fresnel-zone radius at a point d1 from one antenna, d2 from
    the other: R = sqrt(lambda * d1 * d2 / (d1 + d2))."""
    total = geom.d1_m + geom.d2_m
    if total <= 0:
        raise ValueError("d1 + d2 must be > 0")
    return math.sqrt(geom.wavelength_m * geom.d1_m * geom.d2_m / total)


@dataclass(frozen=True)
class LinkModel:
    tx_power_dbm: float = 2.0
    clear_los_range_m: float = 1000.0
    canopy_range_m: float = 250.0
    rolloff_width_m: float = 0.0  # 0 = hard step at the range limit

    def __post_init__(self):
        if self.canopy_range_m >= self.clear_los_range_m:
            raise ValueError("canopy range must be < clear-LoS range")
        if self.rolloff_width_m < 0:
            raise ValueError("rolloff width must be >= 0")

    def range_m(self, in_canopy: bool) -> float:
        return self.canopy_range_m if in_canopy else self.clear_los_range_m

    def success_probability(self, distance_m: float, in_canopy: bool) -> float:
        if distance_m < 0:
            raise ValueError("distance must be >= 0")
        limit = self.range_m(in_canopy)
        if self.rolloff_width_m == 0:
            return 1.0 if distance_m <= limit else 0.0
        start = limit - self.rolloff_width_m
        if distance_m <= start:
            return 1.0
        if distance_m >= limit:
            return 0.0
        return (limit - distance_m) / self.rolloff_width_m


def packet_success(
    model: LinkModel,
    distance_m: float,
    in_canopy: bool = False,
    rng: random.Random | None = None,
) -> bool:
    """Decide one packet's fate.  The rng is consumed only when the success
    probability is strictly between 0 and 1, so hard-step runs stay
    deterministic regardless of rng state."""
    p = model.success_probability(distance_m, in_canopy)
    if p >= 1.0:
        return True
    if p <= 0.0:
        return False
    if rng is None:
        raise ValueError("rng required inside the rolloff band")
    return rng.random() < p


@dataclass(frozen=True)
class AirtimeParams:
    """LoRa modulation parameters.  SF7 with CR 4/5 is the system default."""

    spreading_factor: int = 7
    coding_rate_denominator: int = 5  # 4/5 .. 4/8
    bandwidth_hz: float = 125_000.0
    payload_bytes: int = 9
    preamble_symbols: int = 8
    explicit_header: bool = True
    crc_enabled: bool = True
    low_data_rate_optimize: bool = False

    def __post_init__(self):
        if not 7 <= self.spreading_factor <= 12:
            raise ValueError("spreading factor must be in [7, 12]")
        if not 5 <= self.coding_rate_denominator <= 8:
            raise ValueError("coding rate denominator must be in [5, 8]")
        if self.payload_bytes < 1:
            raise ValueError("payload must be >= 1 byte")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth must be > 0")


def time_on_air(p: AirtimeParams) -> float:
    """Packet airtime in milliseconds (standard LoRa formula)."""
    t_sym_s = (2 ** p.spreading_factor) / p.bandwidth_hz
    de = 1 if p.low_data_rate_optimize else 0
    crc = 1 if p.crc_enabled else 0
    implicit = 0 if p.explicit_header else 1
    numerator = 8 * p.payload_bytes - 4 * p.spreading_factor + 28 + 16 * crc - 20 * implicit
    denominator = 4 * (p.spreading_factor - 2 * de)
    payload_symbols = 8 + max(
        math.ceil(numerator / denominator) * p.coding_rate_denominator, 0
    )
    total_symbols = p.preamble_symbols + 4.25 + payload_symbols
    return total_symbols * t_sym_s * 1000.0
