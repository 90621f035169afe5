"""Append-only event log: JSON Lines with a per-line CRC32 footer.

Events are the single source of truth for an experiment; state is a
deterministic left-fold over them (see :mod:`gsplab.experiment`).
"""
from __future__ import annotations

import json
import zlib
from dataclasses import dataclass
from pathlib import Path

EVENT_TYPES = {
    "ExperimentInitialized", "TrialAssigned", "ResponseRecorded",
    "IterationAggregated", "ChainAdvanced", "ChainCompleted",
    "ExperimentTerminated", "ValidationSetBuilt", "RatingAssigned",
    "RatingRecorded",
}


class CorruptLogError(ValueError):
    def __init__(self, seq: int, reason: str):
        self.seq = seq
        super().__init__(f"corrupt log at seq {seq}: {reason}")


@dataclass(frozen=True)
class Event:
    seq: int
    timestamp: float
    type: str
    payload: dict

    def to_line(self) -> str:
        body = {"seq": self.seq, "t": self.timestamp, "type": self.type,
                "payload": self.payload}
        encoded = json.dumps(body, sort_keys=True, separators=(",", ":"))
        crc = zlib.crc32(encoded.encode("utf-8"))
        return json.dumps({**body, "crc": crc}, sort_keys=True,
                          separators=(",", ":"))

    @staticmethod
    def from_line(line: str, expect_seq: int) -> "Event":
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorruptLogError(expect_seq, f"unparsable line: {e}")
        crc = rec.pop("crc", None)
        encoded = json.dumps(rec, sort_keys=True, separators=(",", ":"))
        if crc != zlib.crc32(encoded.encode("utf-8")):
            raise CorruptLogError(expect_seq, "CRC mismatch")
        if rec.get("seq") != expect_seq:
            raise CorruptLogError(expect_seq, f"gap: found seq {rec.get('seq')}")
        if rec.get("type") not in EVENT_TYPES:
            raise CorruptLogError(expect_seq, f"unknown type {rec.get('type')!r}")
        return Event(rec["seq"], rec["t"], rec["type"], rec["payload"])


class EventLog:
    """In-memory event sequence with optional file persistence."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.events: list[Event] = []
        self._fh = None
        if self.path is not None:
            if self.path.exists():
                self.events = read_log(self.path)
            self._fh = open(self.path, "a", encoding="utf-8")

    @property
    def next_seq(self) -> int:
        return len(self.events) + 1

    def append(self, timestamp: float, type_: str, payload: dict) -> Event:
        ev = Event(self.next_seq, timestamp, type_, payload)
        self.events.append(ev)
        if self._fh is not None:
            self._fh.write(ev.to_line() + "\n")
            self._fh.flush()
        return ev

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def dump(self) -> str:
        return "".join(ev.to_line() + "\n" for ev in self.events)


def read_log(path: str | Path) -> list[Event]:
    """Load and verify a log file; raises CorruptLogError on the first bad seq."""
    events = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            events.append(Event.from_line(line, expect_seq=i))
    return events


def parse_log_text(text: str) -> list[Event]:
    events = []
    for i, line in enumerate(filter(None, (l.strip() for l in text.splitlines())), 1):
        events.append(Event.from_line(line, expect_seq=i))
    return events
