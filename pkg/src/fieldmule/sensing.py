"""Soil-moisture sensing and the calibration chain from volts to VWC.

The galvanic probe produces an open-circuit voltage that rises with soil
moisture.  Calibration maps that voltage to the reference probe's RAW
output with a cubic polynomial, then RAW to volumetric water content (VWC)
with the manufacturer's linear equation.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import random
from dataclasses import dataclass, field

import numpy as np

# Reference-probe RAW -> VWC (m^3/m^3) linear calibration.
TEROS_SLOPE = 3.879e-4
TEROS_INTERCEPT = -0.6956

# Default voltage -> RAW cubic coefficients (a3, a2, a1, a0).
DEFAULT_CUBIC = (-2.34e4, 4.45e4, -2.46e4, 6.09e3)

# Physically impossible for the galvanic cell beyond this.
MAX_SENSOR_VOLTS = 1.5


class SingularFit(Exception):
    """Raised when the calibration design matrix is rank-deficient."""


TimeSeries = list  # list of (timestamp_s, value) pairs, strictly increasing t


def check_series(series) -> None:
    for (t0, _), (t1, _) in zip(series, series[1:]):
        if t1 <= t0:
            raise ValueError("timestamps must be strictly increasing")


def teros_raw_to_vwc(raw: float) -> float:
    """RAW -> VWC fraction.  May go negative below the dry point; callers
    clamp for display only."""
    if not math.isfinite(raw):
        raise ValueError("raw must be finite")
    return TEROS_SLOPE * raw + TEROS_INTERCEPT


def vwc_fraction_to_percent(vwc: float) -> float:
    return vwc * 100.0


@dataclass(frozen=True)
class CalibrationModel:
    """Cubic V->RAW coefficients plus the linear RAW->VWC mapping."""

    a3: float = DEFAULT_CUBIC[0]
    a2: float = DEFAULT_CUBIC[1]
    a1: float = DEFAULT_CUBIC[2]
    a0: float = DEFAULT_CUBIC[3]
    teros_slope: float = TEROS_SLOPE
    teros_intercept: float = TEROS_INTERCEPT

    def voltage_to_raw(self, v: float) -> float:
        return voltage_to_raw(v, self)

    def voltage_to_vwc_percent(self, v: float) -> float:
        raw = self.voltage_to_raw(v)
        vwc = self.teros_slope * raw + self.teros_intercept
        return vwc_fraction_to_percent(vwc)

    def to_text(self) -> str:
        lines = [f"{k} = {getattr(self, k)!r}"
                 for k in ("a3", "a2", "a1", "a0", "teros_slope", "teros_intercept")]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CalibrationModel":
        kv = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            kv[key.strip()] = float(value)
        return cls(**kv)


def voltage_to_raw(v: float, model: CalibrationModel | None = None) -> float:
    """Evaluate the cubic calibration polynomial at sensor voltage v."""
    if not 0.0 <= v <= MAX_SENSOR_VOLTS:
        raise ValueError(f"sensor voltage {v} V outside [0, {MAX_SENSOR_VOLTS}]")
    m = model or CalibrationModel()
    return ((m.a3 * v + m.a2) * v + m.a1) * v + m.a0


def fit_cubic(voltages, raws) -> tuple[CalibrationModel, float]:
    """Least-squares cubic fit of RAW against voltage.

    Accepts aligned TimeSeries or bare value sequences; returns the fitted
    model and R^2 over the training pairs.
    """
    v = _values(voltages)
    r = _values(raws)
    if len(v) != len(r):
        raise ValueError("voltage and raw series must be the same length")
    if len(v) < 4:
        raise ValueError("need at least 4 paired samples for a cubic fit")
    design = np.vander(np.asarray(v, dtype=float), 4)  # columns v^3..v^0
    y = np.asarray(r, dtype=float)
    coeffs, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 4:
        raise SingularFit("design matrix is rank-deficient (constant voltage?)")
    pred = design @ coeffs
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    a3, a2, a1, a0 = (float(c) for c in coeffs)
    return CalibrationModel(a3=a3, a2=a2, a1=a1, a0=a0), r2


def kfold_cv(pairs, k: int = 10, seed: int = 0) -> tuple[float, float]:
    """K-fold cross validation of the cubic calibration.

    pairs: sequence of (voltage, raw).  Folds are a seeded shuffle followed
    by contiguous splits; per-fold score is the mean absolute VWC-percent
    deviation between predicted and true RAW after conversion.  Returns
    (mean, std) over folds.
    """
    pairs = list(pairs)
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > len(pairs):
        raise ValueError(f"k={k} exceeds sample count {len(pairs)}")
    order = list(range(len(pairs)))
    random.Random(seed).shuffle(order)
    # Contiguous folds over the shuffled order; sizes differ by at most 1.
    base, extra = divmod(len(order), k)
    folds, start = [], 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(order[start:start + size])
        start += size
    deviations = []
    for fold in folds:
        test_ix = set(fold)
        train = [pairs[i] for i in order if i not in test_ix]
        test = [pairs[i] for i in fold]
        model, _ = fit_cubic([p[0] for p in train], [p[1] for p in train])
        devs = [
            abs(
                vwc_fraction_to_percent(teros_raw_to_vwc(model.voltage_to_raw(v)))
                - vwc_fraction_to_percent(teros_raw_to_vwc(raw))
            )
            for v, raw in test
        ]
        deviations.append(sum(devs) / len(devs))
    mean = sum(deviations) / k
    std = math.sqrt(sum((d - mean) ** 2 for d in deviations) / k)
    return mean, std


def rolling_mean(series, window: int):
    """Causal trailing mean; first window-1 points average what's available."""
    if window < 1:
        raise ValueError("window must be >= 1")
    check_series(series)
    out = []
    acc = 0.0
    values = []
    for t, v in series:
        values.append(v)
        acc += v
        if len(values) > window:
            acc -= values[-window - 1]
        n = min(len(values), window)
        out.append((t, acc / n))
    return out


class DrainageClass(enum.Enum):
    WELL = "well"
    POOR = "poor"


@dataclass(frozen=True)
class SoilType:
    name: str
    drying_rate_per_hour: float
    drainage_class: DrainageClass
    residual_vwc: float = 0.08
    saturation_vwc: float = 0.45

    def __post_init__(self):
        if self.drying_rate_per_hour <= 0:
            raise ValueError("drying rate must be > 0")


SOIL_TYPES: dict[str, SoilType] = {
    "Osco": SoilType("Osco", 0.25, DrainageClass.WELL),
    "Wyanet": SoilType("Wyanet", 0.22, DrainageClass.WELL),
    "Catlin": SoilType("Catlin", 0.08, DrainageClass.POOR),
    "Potting": SoilType("Potting", 0.06, DrainageClass.POOR),
}


def simulate_soil_vwc(
    soil: SoilType,
    watering_events,
    duration_s: float,
    dt_s: float = 60.0,
    start_vwc: float | None = None,
):
    """Exponential drying toward residual VWC, stepped up at watering events.

    watering_events: iterable of (time_s, added_vwc).  Returns a TimeSeries
    of (t, vwc_fraction).
    """
    events = sorted(watering_events)
    vwc = soil.residual_vwc if start_vwc is None else start_vwc
    if not soil.residual_vwc <= vwc <= soil.saturation_vwc:
        raise ValueError("start VWC outside [residual, saturation]")
    rate_per_s = soil.drying_rate_per_hour / 3600.0
    out = []
    ei = 0
    t = 0.0
    while t <= duration_s + 1e-9:
        while ei < len(events) and events[ei][0] <= t:
            vwc = min(vwc + events[ei][1], soil.saturation_vwc)
            ei += 1
        out.append((t, vwc))
        vwc = soil.residual_vwc + (vwc - soil.residual_vwc) * math.exp(
            -rate_per_s * dt_s
        )
        t += dt_s
    return out


class ElectrodePair(enum.Enum):
    ZN_SS = "ZnSS"  # zinc / stainless steel
    ZN_AL = "ZnAl"  # zinc / aluminum


@dataclass(frozen=True)
class GalvanicSensorModel:
    """Logistic voltage response of the galvanic cell to soil moisture.

    Anchored so the Zn/SS pair plateaus around 0.65 V and the Zn/Al pair
    reads about 0.2 V at 32% VWC.  Optional Gaussian noise and a small
    linear temperature coefficient.
    """

    electrode_pair: ElectrodePair = ElectrodePair.ZN_SS
    spacing_inches: float = 1.0
    noise_sigma_v: float = 0.0
    temp_coeff_v_per_c: float = 0.0005
    reference_temp_c: float = 25.0
    _params: dict = field(default_factory=dict, repr=False)

    def _logistic(self) -> tuple[float, float, float]:
        # (plateau, steepness, midpoint VWC)
        if self.electrode_pair is ElectrodePair.ZN_SS:
            return 0.68, 25.0, 0.12
        return 0.205, 25.0, 0.10

    def voltage(
        self, vwc: float, temp_c: float = 25.0, rng: random.Random | None = None
    ) -> float:
        plateau, steep, mid = self._logistic()
        v = plateau / (1.0 + math.exp(-steep * (vwc - mid)))
        v += self.temp_coeff_v_per_c * (temp_c - self.reference_temp_c)
        if rng is not None and self.noise_sigma_v > 0:
            v += rng.gauss(0.0, self.noise_sigma_v)
        return min(max(v, 0.0), 1.0)


READING_LOG_HEADER = ["timestamp_s", "node_id", "voltage_v", "temp_c", "sun_state"]


def write_reading_log(rows, stream: io.TextIOBase) -> None:
    """rows: iterable of (timestamp_s, node_id, voltage_v, temp_c, sun_state)."""
    w = csv.writer(stream)
    w.writerow(READING_LOG_HEADER)
    for row in rows:
        w.writerow(row)


def read_reading_log(stream: io.TextIOBase):
    r = csv.reader(stream)
    header = next(r)
    if header != READING_LOG_HEADER:
        raise ValueError(f"unexpected reading-log header: {header}")
    out = []
    for ts, node_id, v, temp, sun in r:
        out.append((float(ts), node_id, float(v), float(temp), sun))
    return out


def _values(series):
    """Accept either a TimeSeries of (t, v) or a bare value sequence."""
    series = list(series)
    if series and isinstance(series[0], (tuple, list)):
        check_series(series)
        return [v for _, v in series]
    return series
