"""Supercapacitor energy store, solar harvesting, and per-cycle power budget.

The node's only energy store is a supercapacitor; usable energy is the
stored charge above the minimum operating voltage.  Each wake cycle of the
node FSM drains a fixed, measured amount of energy depending on which path
(A-F) the cycle followed.  Harvesting adds energy back according to a
piecewise light-to-panel profile.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace


class NodeDead(Exception):
    """Raised when a cycle drain would take usable energy below zero."""


class LightCondition(enum.Enum):
    DARK = "dark"
    CLOUDY = "cloudy"
    SUNNY = "sunny"


# Band edges in kLux.  Below CLOUDY_MIN is dark, above SUNNY_MIN is sunny,
# in between is cloudy/diffuse light.
CLOUDY_MIN_KLUX = 5.0
SUNNY_MIN_KLUX = 12.0
FULL_SUN_KLUX = 80.0


def classify_light(klux: float) -> LightCondition:
    """Classify illuminance into dark / cloudy / sunny bands."""
    if not math.isfinite(klux) or klux < 0:
        raise ValueError(f"illuminance must be finite and >= 0, got {klux}")
    if klux < CLOUDY_MIN_KLUX:
        return LightCondition.DARK
    if klux <= SUNNY_MIN_KLUX:
        return LightCondition.CLOUDY
    return LightCondition.SUNNY


@dataclass(frozen=True)
class CapacitorState:
    """Supercapacitor charge state.  Voltages in volts, capacitance in farads."""

    capacitance_farads: float = 1.0
    v_max_volts: float = 5.5
    v_min_volts: float = 3.3
    v_now_volts: float = 5.5

    def __post_init__(self):
        if self.capacitance_farads <= 0:
            raise ValueError("capacitance must be > 0")
        if not 0 <= self.v_min_volts <= self.v_max_volts:
            raise ValueError("need 0 <= v_min <= v_max")
        if not 0 <= self.v_now_volts <= self.v_max_volts + 1e-12:
            raise ValueError("v_now outside [0, v_max]")

    @property
    def full_energy_joules(self) -> float:
        c = replace(self, v_now_volts=self.v_max_volts)
        return usable_energy(c)

    def with_voltage(self, v: float) -> "CapacitorState":
        return replace(self, v_now_volts=v)

    def with_usable_energy(self, energy_j: float) -> "CapacitorState":
        """Invert the energy equation: set v_now so usable energy == energy_j."""
        if energy_j < 0:
            raise ValueError("energy must be >= 0")
        v = math.sqrt(self.v_min_volts**2 + 2.0 * energy_j / self.capacitance_farads)
        return self.with_voltage(min(v, self.v_max_volts))


def usable_energy(cap: CapacitorState) -> float:
    """Energy in joules available above the minimum operating voltage.

    E = 1/2 * C * (v_now^2 - v_min^2), clamped at zero below v_min.
    """
    if cap.v_now_volts <= cap.v_min_volts:
        return 0.0
    return 0.5 * cap.capacitance_farads * (cap.v_now_volts**2 - cap.v_min_volts**2)


# Measured energy per FSM cycle path, in millijoules.
DEFAULT_CYCLE_ENERGY_MJ: dict[str, float] = {
    "A": 429.403,  # ping acked, transmit acked
    "B": 414.165,  # ping unanswered, save to FRAM
    "C": 429.403,  # transmit sent but data-ack lost, save to FRAM
    "D": 47.334,   # post-darkness "alive" ping, no data
    "E": 6.608,    # cloudy: sample and save
    "F": 6.608,    # dark: sample, save, set dark flag
}

CYCLE_PATHS = tuple(DEFAULT_CYCLE_ENERGY_MJ)


@dataclass(frozen=True)
class CyclePowerTable:
    """Energy cost of each FSM cycle path, overridable from scenario config."""

    energy_mj: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_CYCLE_ENERGY_MJ)
    )

    def __post_init__(self):
        missing = set(CYCLE_PATHS) - set(self.energy_mj)
        if missing:
            raise ValueError(f"missing cycle paths: {sorted(missing)}")
        if any(e <= 0 for e in self.energy_mj.values()):
            raise ValueError("cycle energies must be > 0")

    def joules(self, path: str) -> float:
        return self.energy_mj[path] * 1e-3


def drain_cycle(
    cap: CapacitorState, path: str, table: CyclePowerTable | None = None
) -> CapacitorState:
    """Subtract one cycle's energy from the capacitor.

    Raises NodeDead when the store cannot supply the cycle.
    """
    table = table or CyclePowerTable()
    if path not in table.energy_mj:
        raise ValueError(f"unknown cycle path {path!r}")
    remaining = usable_energy(cap) - table.joules(path)
    if remaining < 0:
        raise NodeDead(f"cycle {path} needs {table.joules(path):.6f} J, "
                       f"only {usable_energy(cap):.6f} J available")
    return cap.with_usable_energy(remaining)


@dataclass(frozen=True)
class HarvestProfile:
    """Piecewise map from illuminance to panel electrical output.

    Under diffuse light the MPPT converter holds the panel at voltage with
    essentially no current (the "cloudy" electrical signature); current only
    flows under direct sun, ramping up to max_panel_current_ma at full sun.
    """

    full_sun_power_mw: float = 12.0   # within the 8-14 mW harvested range
    max_panel_current_ma: float = 2.0
    full_sun_klux: float = FULL_SUN_KLUX
    sunny_voltage_v: float = 4.8
    diffuse_voltage_v: float = 4.5
    sunny_min_current_ma: float = 0.5
    leakage_mw: float = 0.0  # optional constant self-discharge

    def panel_signature(self, klux: float) -> tuple[float, float]:
        """(panel_current_mA, panel_voltage_V) at the given illuminance."""
        if klux <= 0:
            return 0.0, 0.0
        if klux < CLOUDY_MIN_KLUX:
            # Near-dark: some open-circuit voltage, no usable current.
            return 0.0, 0.16 * klux
        if klux <= SUNNY_MIN_KLUX:
            return 0.0, self.diffuse_voltage_v
        frac = min((klux - SUNNY_MIN_KLUX) / (self.full_sun_klux - SUNNY_MIN_KLUX), 1.0)
        current = self.sunny_min_current_ma + (
            self.max_panel_current_ma - self.sunny_min_current_ma
        ) * frac
        return current, self.sunny_voltage_v

    def harvest_power_mw(self, klux: float) -> float:
        current, _ = self.panel_signature(klux)
        return self.full_sun_power_mw * current / self.max_panel_current_ma


def harvest_step(
    cap: CapacitorState, profile: HarvestProfile, klux: float, dt_seconds: float
) -> CapacitorState:
    """Add harvested energy over dt seconds, capped at v_max, minus leakage."""
    if dt_seconds <= 0:
        raise ValueError("dt must be > 0")
    power_w = (profile.harvest_power_mw(klux) - profile.leakage_mw) * 1e-3
    energy = usable_energy(cap) + power_w * dt_seconds
    energy = min(max(energy, 0.0), cap.full_energy_joules)
    return cap.with_usable_energy(energy)


# Programmable range of the external wake timer.
MIN_DUTY_CYCLE_MINUTES = 0.1 / 60.0  # 100 ms
MAX_DUTY_CYCLE_MINUTES = 120.0       # 2 hours


def lifetime_in_darkness(
    cap: CapacitorState,
    table: CyclePowerTable | None = None,
    duty_cycle_minutes: float = 20.0,
) -> float:
    """Days of operation in total darkness (every cycle takes the dark path).

    The store supports a fixed number of dark cycles; lifetime scales
    linearly with the duty cycle.
    """
    if not MIN_DUTY_CYCLE_MINUTES <= duty_cycle_minutes <= MAX_DUTY_CYCLE_MINUTES:
        raise ValueError(
            f"duty cycle {duty_cycle_minutes} min outside timer range "
            f"[{MIN_DUTY_CYCLE_MINUTES:.4f}, {MAX_DUTY_CYCLE_MINUTES}]"
        )
    table = table or CyclePowerTable()
    cycles = math.floor(usable_energy(cap) / table.joules("F"))
    return cycles * duty_cycle_minutes / 1440.0
