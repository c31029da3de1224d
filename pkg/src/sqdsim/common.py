"""Small pieces shared by both protocol state machines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigError, InsufficientZPhotons, ThresholdAbort

INSUFFICIENT_Z = "insufficient_z"


def to_bits(message: str | Sequence[int], n: int | None = None,
            name: str = "message") -> list[int]:
    """Normalise ``'0101'`` or ``[0, 1, 0, 1]`` to a list of ints."""
    if isinstance(message, str):
        if any(ch not in "01" for ch in message):
            raise ConfigError(f"{name} must be a bit string, got {message!r}")
        bits = [int(ch) for ch in message]
    else:
        bits = [int(b) for b in message]
        if any(b not in (0, 1) for b in bits):
            raise ConfigError(f"{name} must contain only 0 and 1")
    if n is not None and len(bits) != n:
        raise ConfigError(f"{name} has length {len(bits)}, expected {n}")
    return bits


def bit_string(bits: Iterable[int]) -> str:
    return "".join(str(int(b)) for b in bits)


@dataclass(frozen=True)
class CheckStats:
    """Error count over the comparable photons of one security check."""

    errors: int = 0
    checked: int = 0

    @property
    def rate(self) -> float:
        return self.errors / self.checked if self.checked else 0.0

    def __add__(self, other: "CheckStats") -> "CheckStats":
        return CheckStats(self.errors + other.errors, self.checked + other.checked)

    def passes(self, threshold: float) -> bool:
        # A measured rate at or above the threshold terminates the run.
        return self.rate < threshold

    def to_dict(self) -> dict:
        return {"errors": self.errors, "checked": self.checked, "rate": self.rate}


class OutcomeMixin:
    aborted_at: str | None

    @property
    def aborted(self) -> bool:
        return self.aborted_at is not None

    def raise_for_abort(self) -> None:
        """Raise the matching :class:`ProtocolAbort` if the run terminated."""
        if self.aborted_at is None:
            return
        if self.aborted_at == INSUFFICIENT_Z:
            raise InsufficientZPhotons(self.aborted_at, self)
        raise ThresholdAbort(self.aborted_at, self)


def check_threshold(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value < 1.0:
        raise ConfigError(f"{name} must be in [0, 1), got {value}")
    return value
