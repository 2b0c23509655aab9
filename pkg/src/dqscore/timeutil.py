from __future__ import annotations

from datetime import datetime, timedelta, timezone

from .rdf import XSD_DATETIME, Literal


def format_datetime(ts: datetime) -> str:
    """UTC ``xsd:dateTime`` lexical form, millisecond precision, ``Z`` suffix."""
    if ts.tzinfo is None:
        raise ValueError("timestamps must be timezone-aware")
    ts = ts.astimezone(timezone.utc)
    text = ts.strftime("%Y-%m-%dT%H:%M:%S")
    if ts.microsecond:
        text += f".{ts.microsecond // 1000:03d}"
    return text + "Z"


def parse_datetime(text: str) -> datetime:
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def datetime_literal(ts: datetime) -> Literal:
    return Literal(format_datetime(ts), XSD_DATETIME)


class VirtualClock:
    """Counter-based clock: each :meth:`tick` advances by a fixed step."""

    def __init__(self, start: datetime, step: timedelta = timedelta(seconds=1)):
        if start.tzinfo is None:
            raise ValueError("clock start must be timezone-aware")
        self.start = start
        self.step = step
        self.count = 0

    def now(self) -> datetime:
        return self.start + self.step * self.count

    def tick(self) -> datetime:
        ts = self.now()
        self.count += 1
        return ts
