"""Battery-free node runtime: wake-cycle FSM, FRAM buffering, and the node
side of the handshake protocol.

Every wake starts from deep sleep, branches on the inferred light
condition and the dark flag, produces exactly one sensor record (saved or
transmitted), drains the measured cycle energy, and returns to sleep.
"""

from __future__ import annotations

import enum
import struct
from collections import deque
from dataclasses import dataclass, field

from .energy import (
    CapacitorState,
    CyclePowerTable,
    LightCondition,
    NodeDead,
    drain_cycle,
    usable_energy,
)


class FsmState(enum.Enum):
    S1_CPU_ON = "S1"
    S1B_POWER_ON = "S1B"
    S2_PING_BASE = "S2"
    S3_TRANSMIT = "S3"
    S3B_SAVE_DATA = "S3B"
    S4_CHARGING = "S4"
    S5_CLOUDY = "S5"
    S6_DARK = "S6"
    S7_SLEEP = "S7"


_SUN_BITS = {
    LightCondition.DARK: 0,
    LightCondition.CLOUDY: 1,
    LightCondition.SUNNY: 2,
}
_BITS_SUN = {v: k for k, v in _SUN_BITS.items()}

RECORD_BYTES = 9
_RECORD_STRUCT = struct.Struct("<BhHI")  # flags, temp, voltage, cycle index


@dataclass(frozen=True)
class SensorRecord:
    """One logged reading, 9 bytes on the wire.

    Layout (little-endian): 1 flag byte (sun state in low 2 bits),
    int16 temperature in centi-degC, uint16 signal voltage in tenths of a
    millivolt (0..6.5535 V), uint32 cycle index.
    """

    sun_state: LightCondition
    temp_centi_c: int
    voltage_tenth_mv: int
    cycle_index: int

    def __post_init__(self):
        if not -32768 <= self.temp_centi_c <= 32767:
            raise ValueError("temperature out of int16 range")
        if not 0 <= self.voltage_tenth_mv <= 0xFFFF:
            raise ValueError("voltage out of uint16 range")
        if not 0 <= self.cycle_index <= 0xFFFFFFFF:
            raise ValueError("cycle index out of uint32 range")

    @classmethod
    def from_reading(
        cls, sun_state: LightCondition, temp_c: float, voltage_v: float, cycle_index: int
    ) -> "SensorRecord":
        return cls(
            sun_state=sun_state,
            temp_centi_c=round(temp_c * 100),
            voltage_tenth_mv=round(voltage_v * 10_000),
            cycle_index=cycle_index,
        )

    @property
    def voltage_v(self) -> float:
        return self.voltage_tenth_mv / 10_000.0

    @property
    def temp_c(self) -> float:
        return self.temp_centi_c / 100.0

    def encode(self) -> bytes:
        return _RECORD_STRUCT.pack(
            _SUN_BITS[self.sun_state],
            self.temp_centi_c,
            self.voltage_tenth_mv,
            self.cycle_index,
        )

    @classmethod
    def decode(cls, data: bytes) -> "SensorRecord":
        if len(data) != RECORD_BYTES:
            raise ValueError(f"record must be {RECORD_BYTES} bytes")
        flags, temp, volt, cycle = _RECORD_STRUCT.unpack(data)
        return cls(_BITS_SUN[flags & 0x03], temp, volt, cycle)


FRAM_CAPACITY_RECORDS = 4600


class FramBuffer:
    """Non-volatile FIFO of sensor records; drop-oldest on overflow."""

    def __init__(self, capacity_records: int = FRAM_CAPACITY_RECORDS):
        self.capacity_records = capacity_records
        self._records: deque[SensorRecord] = deque()
        self.overflow_count = 0

    def __len__(self) -> int:
        return len(self._records)

    def push(self, rec: SensorRecord) -> None:
        if len(self._records) >= self.capacity_records:
            self._records.popleft()
            self.overflow_count += 1
        self._records.append(rec)

    def peek_all(self) -> list[SensorRecord]:
        return list(self._records)

    def clear(self) -> None:
        self._records.clear()

    def to_bytes(self) -> bytes:
        return b"".join(r.encode() for r in self._records)

    @classmethod
    def from_bytes(cls, data: bytes, capacity_records: int = FRAM_CAPACITY_RECORDS,
                   overflow_count: int = 0) -> "FramBuffer":
        if len(data) % RECORD_BYTES:
            raise ValueError("buffer image is not a whole number of records")
        buf = cls(capacity_records)
        for i in range(0, len(data), RECORD_BYTES):
            buf._records.append(SensorRecord.decode(data[i:i + RECORD_BYTES]))
        buf.overflow_count = overflow_count
        return buf


def buffer_push(buf: FramBuffer, rec: SensorRecord) -> FramBuffer:
    buf.push(rec)
    return buf


@dataclass(frozen=True)
class PanelSignature:
    panel_current_ma: float
    panel_voltage_v: float

    def __post_init__(self):
        if self.panel_current_ma < 0 or self.panel_voltage_v < 0:
            raise ValueError("panel signature must be non-negative")


@dataclass(frozen=True)
class InferenceThresholds:
    sunny_min_current_ma: float = 0.5
    cloudy_max_current_ma: float = 0.1
    cloudy_min_voltage_v: float = 1.0


def infer_condition(
    sig: PanelSignature, thresholds: InferenceThresholds | None = None
) -> LightCondition:
    """Infer light condition from the panel's electrical signature.

    Direct sun drives real current; diffuse light shows the MPPT holding
    voltage with no current; anything else reads as dark.
    """
    th = thresholds or InferenceThresholds()
    if sig.panel_current_ma >= th.sunny_min_current_ma:
        return LightCondition.SUNNY
    if (
        sig.panel_current_ma < th.cloudy_max_current_ma
        and sig.panel_voltage_v >= th.cloudy_min_voltage_v
    ):
        return LightCondition.CLOUDY
    return LightCondition.DARK


@dataclass
class WakeResult:
    path: str
    record: SensorRecord
    transmitted: list[SensorRecord] = field(default_factory=list)
    delivered: bool = False  # data-ack received
    alive_ping: bool = False


class NodeFsm:
    """Per-node runtime state advanced one wake cycle at a time."""

    def __init__(
        self,
        node_id: str,
        cap: CapacitorState | None = None,
        buffer: FramBuffer | None = None,
        duty_cycle_minutes: float = 20.0,
        power_table: CyclePowerTable | None = None,
    ):
        self.node_id = node_id
        self.state = FsmState.S7_SLEEP
        self.dark_flag = False
        self.cycle_counter = 0
        self.cap = cap or CapacitorState()
        self.buffer = buffer or FramBuffer()
        self.duty_cycle_minutes = duty_cycle_minutes
        self.power_table = power_table or CyclePowerTable()

    def wake(
        self,
        condition: LightCondition,
        sensor_voltage_v: float,
        temp_c: float,
        radio,
    ) -> WakeResult:
        """Run one full wake cycle and return what happened.

        radio must provide ping(node_id) -> bool, send_data(node_id,
        records) -> bool, and send_alive_ping(node_id) -> None.  Raises
        NodeDead (without consuming a cycle index) when the store cannot
        cover even the cheapest path.
        """
        table = self.power_table
        if usable_energy(self.cap) < table.joules("F"):
            raise NodeDead(f"node {self.node_id} cannot afford a wake cycle")
        self.state = FsmState.S1_CPU_ON
        cycle_index = self.cycle_counter
        record = SensorRecord.from_reading(condition, temp_c, sensor_voltage_v, cycle_index)

        if condition is LightCondition.SUNNY and self.dark_flag:
            result = self._path_d(record, radio)
        elif condition is LightCondition.SUNNY:
            result = self._sunny_cycle(record, radio, table)
        elif condition is LightCondition.CLOUDY:
            result = self._save_only(record, "E", FsmState.S5_CLOUDY)
        else:
            result = self._save_only(record, "F", FsmState.S6_DARK)
            self.dark_flag = True

        self.cap = drain_cycle(self.cap, result.path, table)
        self.cycle_counter += 1
        self.state = FsmState.S7_SLEEP
        return result

    def _sunny_cycle(self, record: SensorRecord, radio, table: CyclePowerTable) -> WakeResult:
        if usable_energy(self.cap) < table.joules("A"):
            # Not enough charge to run the radio: log and sleep instead.
            return self._save_only(record, "E", FsmState.S5_CLOUDY)
        self.state = FsmState.S1B_POWER_ON
        self.state = FsmState.S2_PING_BASE
        if not radio.ping(self.node_id):
            self.state = FsmState.S3B_SAVE_DATA
            self.buffer.push(record)
            return WakeResult(path="B", record=record)
        self.state = FsmState.S3_TRANSMIT
        batch = self.buffer.peek_all() + [record]
        if radio.send_data(self.node_id, batch):
            self.buffer.clear()
            return WakeResult(path="A", record=record, transmitted=batch, delivered=True)
        # Data-ack lost: keep everything (including the fresh record) for retry.
        self.state = FsmState.S3B_SAVE_DATA
        self.buffer.push(record)
        return WakeResult(path="C", record=record, transmitted=batch)

    def _path_d(self, record: SensorRecord, radio) -> WakeResult:
        self.state = FsmState.S4_CHARGING
        radio.send_alive_ping(self.node_id)
        self.buffer.push(record)
        self.dark_flag = False
        return WakeResult(path="D", record=record, alive_ping=True)

    def _save_only(self, record: SensorRecord, path: str, state: FsmState) -> WakeResult:
        self.state = state
        self.buffer.push(record)
        return WakeResult(path=path, record=record)

    # Checkpoint/restore for long simulations.

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "dark_flag": self.dark_flag,
            "cycle_counter": self.cycle_counter,
            "duty_cycle_minutes": self.duty_cycle_minutes,
            "cap": {
                "capacitance_farads": self.cap.capacitance_farads,
                "v_max_volts": self.cap.v_max_volts,
                "v_min_volts": self.cap.v_min_volts,
                "v_now_volts": self.cap.v_now_volts,
            },
            "buffer_hex": self.buffer.to_bytes().hex(),
            "buffer_capacity": self.buffer.capacity_records,
            "buffer_overflow_count": self.buffer.overflow_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NodeFsm":
        node = cls(
            node_id=d["node_id"],
            cap=CapacitorState(**d["cap"]),
            buffer=FramBuffer.from_bytes(
                bytes.fromhex(d["buffer_hex"]),
                capacity_records=d["buffer_capacity"],
                overflow_count=d["buffer_overflow_count"],
            ),
            duty_cycle_minutes=d["duty_cycle_minutes"],
        )
        node.dark_flag = d["dark_flag"]
        node.cycle_counter = d["cycle_counter"]
        return node


def reconstruct_timestamps(
    records, anchor: tuple[int, float], duty_cycle_minutes: float
) -> list[tuple[float, SensorRecord]]:
    """Recover wall times from cycle indices using one (index, time) anchor.

    Works both directions: records before or after the anchor index.
    """
    anchor_index, anchor_time = anchor
    seen = set()
    out = []
    for rec in records:
        if rec.cycle_index in seen:
            raise ValueError(f"duplicate cycle index {rec.cycle_index}")
        seen.add(rec.cycle_index)
        dt = (anchor_index - rec.cycle_index) * duty_cycle_minutes * 60.0
        out.append((anchor_time - dt, rec))
    return out
