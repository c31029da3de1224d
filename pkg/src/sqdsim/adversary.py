"""Outside-eavesdropper strategies and Eve's inference about the messages.

Every strategy owns a :class:`KnowledgeRecord` that lists exactly what Eve
observed on the quantum channel and which announcements she read.
:func:`guess_messages` turns that record plus the public transcript into the
set of secret-bit pairs Eve cannot rule out.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable

from .channel import Announcement, PhotonBlock, Transcript
from .errors import ConfigError
from .qubit import Basis, Photon, Rng, measure, parse_photon, prepare


@dataclass(frozen=True)
class Observation:
    leg: str
    position: int
    basis: Basis
    outcome: int


@dataclass(frozen=True)
class Injection:
    leg: str
    position: int
    state: Photon


@dataclass
class KnowledgeRecord:
    """Append-only record of everything Eve has learned during a run."""

    observed_measurements: list[Observation] = field(default_factory=list)
    injected: list[Injection] = field(default_factory=list)
    intercepted_blocks: list[tuple[str, PhotonBlock]] = field(default_factory=list)
    read_announcements: list[Announcement] = field(default_factory=list)

    def sizes(self) -> dict[str, int]:
        return {"measured": len(self.observed_measurements),
                "injected": len(self.injected),
                "intercepted": len(self.intercepted_blocks)}

    def index(self) -> "KnowledgeIndex":
        return KnowledgeIndex(
            {(o.leg, o.position): o for o in self.observed_measurements},
            {(i.leg, i.position): i for i in self.injected})


@dataclass(frozen=True)
class KnowledgeIndex:
    """Lookup of Eve's channel records by (leg, position)."""

    observations: dict[tuple[str, int], Observation]
    injections: dict[tuple[str, int], Injection]

    def observation(self, leg: str, position: int) -> Observation | None:
        return self.observations.get((leg, position))

    def injection(self, leg: str, position: int) -> Injection | None:
        return self.injections.get((leg, position))


class BasisPolicy(enum.Enum):
    ALWAYS_Z = "z"
    ALWAYS_X = "x"
    UNIFORM_RANDOM = "random"

    def draw(self, rng: Rng) -> Basis:
        if self is BasisPolicy.ALWAYS_Z:
            return Basis.Z
        if self is BasisPolicy.ALWAYS_X:
            return Basis.X
        return rng.basis()


@dataclass
class Adversary:
    """Base strategy. ``legs=None`` attacks every transmission."""

    legs: frozenset[str] | None = None
    knowledge: KnowledgeRecord = field(default_factory=KnowledgeRecord)

    name = "adversary"

    def __post_init__(self):
        if self.legs is not None:
            self.legs = frozenset(self.legs)

    def targets(self, leg: str) -> bool:
        return self.legs is None or leg in self.legs

    def attach(self, transcript: Transcript) -> None:
        transcript.subscribe(self.knowledge.read_announcements.append)

    def apply(self, block: PhotonBlock, rng: Rng, leg: str = "") -> PhotonBlock:
        if not self.targets(leg):
            return block
        return self._attack(block, rng, leg)

    def _attack(self, block: PhotonBlock, rng: Rng, leg: str) -> PhotonBlock:
        return block


@dataclass
class Passive(Adversary):
    name = "passive"


@dataclass
class InterceptResend(Adversary):
    """Measure each photon in a policy-chosen basis and forward the result."""

    policy: BasisPolicy = BasisPolicy.UNIFORM_RANDOM

    name = "intercept-resend"

    def _attack(self, block, rng, leg):
        out = []
        for pos, photon in enumerate(block):
            basis = self.policy.draw(rng)
            outcome, collapsed = measure(photon, basis, rng)
            self.knowledge.observed_measurements.append(
                Observation(leg, pos, basis, outcome))
            out.append(collapsed)
        return PhotonBlock(tuple(out), block.origin)


@dataclass
class MeasureResend(InterceptResend):
    """Intercept-resend with one fixed basis."""

    basis: Basis = Basis.Z

    name = "measure-resend"

    def __post_init__(self):
        super().__post_init__()
        self.policy = (BasisPolicy.ALWAYS_Z if self.basis is Basis.Z
                       else BasisPolicy.ALWAYS_X)


@dataclass
class FakeStateInjection(Adversary):
    """Keep the genuine block and forward photons of Eve's own making.

    ``state=None`` draws each fake photon uniformly from the four states.
    """

    state: Photon | None = None

    name = "fake-injection"

    def _attack(self, block, rng, leg):
        self.knowledge.intercepted_blocks.append((leg, block))
        out = []
        for pos in range(len(block)):
            fake = self.state
            if fake is None:
                basis = rng.basis()
                fake = prepare(basis, rng.bit())
            self.knowledge.injected.append(Injection(leg, pos, fake))
            out.append(fake)
        return PhotonBlock(tuple(out), "eve")


def make_adversary(spec: str | None) -> Adversary:
    """Build a strategy from ``name[:param][,legs=a+b]``.

    Names: ``passive``, ``intercept-resend[:z|x|random]``,
    ``measure-resend:Z|X``, ``fake[:0|1|+|-|random]``.
    """
    spec = (spec or "passive").strip()
    name, _, rest = spec.partition(":")
    name = name.strip().lower().replace("_", "-")
    param = None
    legs = None
    for token in filter(None, (t.strip() for t in rest.split(","))):
        key, eq, value = token.partition("=")
        if eq:
            if key.strip() != "legs":
                raise ConfigError(f"unknown adversary option {key!r}")
            legs = frozenset(v for v in value.split("+") if v)
        elif param is None:
            param = token
        else:
            raise ConfigError(f"too many adversary parameters in {spec!r}")
    try:
        if name == "passive":
            if param is not None:
                raise ConfigError("passive adversary takes no parameters")
            return Passive(legs=legs)
        if name in ("intercept-resend", "intercept"):
            return InterceptResend(legs=legs,
                                   policy=BasisPolicy((param or "random").lower()))
        if name == "measure-resend":
            return MeasureResend(legs=legs, basis=Basis((param or "Z").upper()))
        if name in ("fake", "fake-injection"):
            state = None if param in (None, "random") else parse_photon(param)
            return FakeStateInjection(legs=legs, state=state)
    except ValueError as exc:
        raise ConfigError(f"bad adversary parameter in {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown adversary {name!r}")


# -- inference -------------------------------------------------------------

Hypotheses = frozenset  # of (alice_bit, bob_bit)


def guess_messages(knowledge: KnowledgeRecord | None, transcript: Transcript,
                   protocol: int | None = None) -> list[Hypotheses]:
    """Per message position, the (a, b) pairs consistent with Eve's view.

    Each position is handled by exact enumeration over the secret bits and
    the hidden photon values. A constraint is only added when it is certain:
    e.g. a Z-basis observation of a Z-basis photon pins its value, while an
    X-basis observation of it pins nothing and randomises what the next
    party measures.
    """
    protocol = protocol or transcript.protocol
    index = (knowledge or KnowledgeRecord()).index()
    if protocol == 1:
        return _guess_protocol1(index, transcript)
    if protocol == 2:
        return _guess_protocol2(index, transcript)
    raise ConfigError(f"unknown protocol {protocol!r}")


Constraint = Callable[[dict], bool]


def _enumerate(variables: tuple[str, ...], constraints: list[Constraint]) -> Hypotheses:
    consistent = set()
    for values in itertools.product((0, 1), repeat=len(variables)):
        env = dict(zip(variables, values))
        if all(c(env) for c in constraints):
            consistent.add((env["a"], env["b"]))
    return frozenset(consistent)


def _leaked_initial_bits(transcript: Transcript) -> list[int] | None:
    leak = transcript.last("leak")
    return None if leak is None else leak.payload.get("initial_bits")


def _photon_constraints(knowledge: KnowledgeIndex, leg: str, position: int,
                        sent, received: str) -> list[Constraint]:
    """Constraints linking the Z value Bob-side ``sent`` to what the next
    party reads as ``received`` after Eve's action at (leg, position)."""
    obs = knowledge.observation(leg, position)
    inj = knowledge.injection(leg, position)
    if inj is not None:
        if inj.state.basis is Basis.Z:
            s = inj.state.bit
            return [lambda e: e[received] == s]
        return []
    if obs is not None:
        if obs.basis is Basis.Z:
            y = obs.outcome
            return [lambda e: sent(e) == y, lambda e: e[received] == y]
        return []
    return [lambda e: e[received] == sent(e)]


def _guess_protocol1(knowledge: KnowledgeIndex, transcript: Transcript) -> list[Hypotheses]:
    final = transcript.last("final_states")
    reorder = transcript.last("reorder")
    if final is None or reorder is None:
        return []
    order = reorder.payload["order"]
    outgoing_slot = {orig: k for k, orig in enumerate(order)}
    leaked = _leaked_initial_bits(transcript)
    result = []
    # a, b: secrets; d: Bob's Z result at encoding; r: the Z value Alice
    # holds before her own encoding, so the announced bit is r ^ a.
    for i, (pos, f) in enumerate(zip(reorder.payload["message_positions"],
                                     final.payload["bits"])):
        cons: list[Constraint] = [lambda e, f=f: e["r"] == f ^ e["a"]]
        # Leg 1: Alice -> Bob; a Z observation or a Z fake fixes d.
        obs1 = knowledge.observation("step1", pos)
        inj1 = knowledge.injection("step1", pos)
        if inj1 is not None and inj1.state.basis is Basis.Z:
            cons.append(lambda e, s=inj1.state.bit: e["d"] == s)
        elif inj1 is None and obs1 is not None and obs1.basis is Basis.Z:
            cons.append(lambda e, y=obs1.outcome: e["d"] == y)
        # Leg 4: Bob's fresh photon |d ^ b> travels back to Alice.
        cons += _photon_constraints(knowledge, "step4", outgoing_slot[pos],
                                    lambda e: e["d"] ^ e["b"], "r")
        if leaked is not None:
            cons.append(lambda e, x=leaked[i]: e["d"] == x)
        result.append(_enumerate(("a", "b", "d", "r"), cons))
    return result


def _guess_protocol2(knowledge: KnowledgeIndex, transcript: Transcript) -> list[Hypotheses]:
    cipher = transcript.last("ciphertexts")
    order = transcript.last("message_order")
    if cipher is None or order is None:
        return []
    positions = order.payload["positions"]
    leaked = _leaked_initial_bits(transcript)
    result = []
    # d: Bob's first photon; u, v: Alice's Z readings of the pair.
    for i, c in enumerate(cipher.payload["bits"]):
        p1, p2 = positions[2 * i], positions[2 * i + 1]
        cons: list[Constraint] = [lambda e, c=c: e["a"] ^ e["v"] == c]
        cons += _photon_constraints(knowledge, "step2", p1, lambda e: e["d"], "u")
        cons += _photon_constraints(knowledge, "step2", p2,
                                    lambda e: e["d"] ^ e["b"], "v")
        if leaked is not None:
            cons.append(lambda e, x=leaked[i]: e["d"] == x)
        result.append(_enumerate(("a", "b", "d", "u", "v"), cons))
    return result
