"""Quantum and classical channels, and the public transcript of a run.

The quantum channel moves ordered photon blocks between the parties and lets
the adversary act on each block in transit. The classical channel is
authenticated: announcements are appended to the transcript and every
listener (including the adversary) sees them immediately, but nobody can
alter them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Sequence

from .errors import ConfigError
from .qubit import Basis, Photon, Rng

ALICE = "alice"
BOB = "bob"
EVE = "eve"

TRANSCRIPT_FORMAT = "sqdsim-transcript/1"


@dataclass(frozen=True)
class PhotonBlock:
    photons: tuple[Photon, ...]
    origin: str

    def __post_init__(self):
        object.__setattr__(self, "photons", tuple(self.photons))

    def __len__(self) -> int:
        return len(self.photons)

    def __iter__(self) -> Iterator[Photon]:
        return iter(self.photons)

    def __getitem__(self, i):
        return self.photons[i]

    def labels(self) -> str:
        return "".join(p.label for p in self.photons)


@dataclass(frozen=True)
class Permutation:
    """Reordering of a block: outgoing slot ``k`` carries input ``order[k]``."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        if sorted(order) != list(range(len(order))):
            raise ConfigError("permutation must be a bijection on 0..n-1")
        object.__setattr__(self, "order", order)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def random(cls, n: int, rng: Rng) -> "Permutation":
        return cls(tuple(rng.permutation(n)))

    def __len__(self) -> int:
        return len(self.order)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.order)
        for k, i in enumerate(self.order):
            inv[i] = k
        return Permutation(tuple(inv))

    def apply(self, items: Sequence) -> list:
        if len(items) != len(self.order):
            raise ConfigError(
                f"permutation of size {len(self.order)} applied to {len(items)} items"
            )
        return [items[i] for i in self.order]

    def undo(self, items: Sequence) -> list:
        if len(items) != len(self.order):
            raise ConfigError(
                f"permutation of size {len(self.order)} applied to {len(items)} items"
            )
        out = [None] * len(items)
        for k, i in enumerate(self.order):
            out[i] = items[k]
        return out


def permute(block: PhotonBlock, perm: Permutation) -> PhotonBlock:
    return PhotonBlock(tuple(perm.apply(block.photons)), block.origin)


def unpermute(block: PhotonBlock, perm: Permutation) -> PhotonBlock:
    return PhotonBlock(tuple(perm.undo(block.photons)), block.origin)


@dataclass(frozen=True)
class Announcement:
    seq: int
    sender: str
    kind: str
    payload: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"seq": self.seq, "event": "announce", "sender": self.sender,
                "kind": self.kind, "payload": self.payload}


@dataclass(frozen=True)
class QuantumEvent:
    seq: int
    leg: str
    sender: str
    receiver: str
    size: int
    adversary: str
    summary: dict[str, int]

    def to_dict(self) -> dict[str, Any]:
        return {"seq": self.seq, "event": "quantum", "leg": self.leg,
                "sender": self.sender, "receiver": self.receiver,
                "size": self.size, "adversary": self.adversary,
                "summary": self.summary}


@dataclass(frozen=True)
class Action:
    """One private operation by a party; used to audit Bob's capabilities.

    ``role`` is ``"message"`` for resources that carry secret bits and
    ``"check"`` for eavesdropping-check overhead.
    """

    party: str
    kind: str  # prepare | measure | unitary | reflect | reorder | send
    basis: Basis | None = None
    role: str = "check"


@dataclass
class Transcript:
    """Totally ordered log of quantum transmissions and public announcements."""

    protocol: int
    meta: dict[str, Any] = field(default_factory=dict)
    events: list[Announcement | QuantumEvent] = field(default_factory=list)
    _listeners: list[Callable[[Announcement], None]] = field(
        default_factory=list, repr=False, compare=False)

    def subscribe(self, listener: Callable[[Announcement], None]) -> None:
        self._listeners.append(listener)

    def announce(self, sender: str, kind: str, **payload) -> Announcement:
        a = Announcement(len(self.events), sender, kind, _plain(payload))
        self.events.append(a)
        for listener in self._listeners:
            listener(a)
        return a

    def record_transmission(self, leg: str, sender: str, receiver: str,
                            size: int, adversary: str,
                            summary: dict[str, int]) -> QuantumEvent:
        ev = QuantumEvent(len(self.events), leg, sender, receiver, size,
                          adversary, dict(summary))
        self.events.append(ev)
        return ev

    @property
    def classical_events(self) -> list[Announcement]:
        return [e for e in self.events if isinstance(e, Announcement)]

    @property
    def quantum_events(self) -> list[QuantumEvent]:
        return [e for e in self.events if isinstance(e, QuantumEvent)]

    def announcements(self, kind: str | None = None) -> list[Announcement]:
        return [e for e in self.classical_events if kind is None or e.kind == kind]

    def last(self, kind: str) -> Announcement | None:
        found = self.announcements(kind)
        return found[-1] if found else None

    def header(self) -> dict[str, Any]:
        return {"event": "header", "format": TRANSCRIPT_FORMAT,
                "protocol": self.protocol, "meta": self.meta}

    def to_jsonl(self) -> str:
        lines = [self.header()] + [e.to_dict() for e in self.events]
        return "".join(json.dumps(x, sort_keys=True) + "\n" for x in lines)

    @classmethod
    def from_jsonl(cls, text: str | Iterable[str]) -> "Transcript":
        lines = text.splitlines() if isinstance(text, str) else list(text)
        records = [json.loads(line) for line in lines if line.strip()]
        if not records or records[0].get("event") != "header":
            raise ConfigError("transcript must start with a header line")
        head = records[0]
        if head.get("format") != TRANSCRIPT_FORMAT:
            raise ConfigError(f"unsupported transcript format {head.get('format')!r}")
        t = cls(protocol=int(head["protocol"]), meta=head.get("meta", {}))
        for rec in records[1:]:
            kind = rec.get("event")
            if kind == "announce":
                t.events.append(Announcement(rec["seq"], rec["sender"], rec["kind"],
                                             rec["payload"]))
            elif kind == "quantum":
                t.events.append(QuantumEvent(rec["seq"], rec["leg"], rec["sender"],
                                             rec["receiver"], rec["size"],
                                             rec["adversary"], rec["summary"]))
            else:
                raise ConfigError(f"unknown transcript event {kind!r}")
        return t

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl())

    @classmethod
    def read(cls, path: str | Path) -> "Transcript":
        try:
            return cls.from_jsonl(Path(path).read_text())
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise ConfigError(f"cannot read transcript {path}: {exc}") from exc


def send_block(block: PhotonBlock, adversary, rng: Rng, *,
               transcript: Transcript | None = None, leg: str = "",
               receiver: str = "") -> PhotonBlock:
    """Deliver ``block`` through the quantum channel.

    The adversary sees (and may replace) the whole ordered batch in one
    event; the transmission is logged with a summary of what it did.
    """
    if adversary is None:
        out, summary, name = block, {}, "passive"
    else:
        before = adversary.knowledge.sizes()
        out = adversary.apply(block, rng, leg=leg)
        after = adversary.knowledge.sizes()
        summary = {k: after[k] - before[k] for k in after if after[k] != before[k]}
        name = adversary.name
    if len(out) != len(block):
        raise ConfigError("adversary must preserve block length")
    if transcript is not None:
        transcript.record_transmission(leg, block.origin, receiver, len(block),
                                       name, summary)
    return out


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return int(value)
    if isinstance(value, float):
        return float(value)
    if isinstance(value, Basis):
        return value.value
    raise TypeError(f"cannot publish value of type {type(value).__name__}")
