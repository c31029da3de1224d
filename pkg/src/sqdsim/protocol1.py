"""Semi-quantum dialogue where classical Bob can measure in the Z basis.

Quantum Alice sends 8N random BB84 states. Bob checks half of them
(reflect or Z measure-resend), keeps the rest, encodes his N bits on Z-basis
photons by measuring and re-preparing ``|delta ^ b>``, shuffles everything
and sends it back. After a decoy check on the sample photons Alice applies
I or sigma_x for her own bits, measures in Z and publishes the results.
Both sides know ``delta`` (Alice prepared it, Bob measured it), so each can
strip it off and read the other's bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .adversary import Adversary, KnowledgeRecord, Passive
from .channel import (ALICE, BOB, Action, Permutation, PhotonBlock, Transcript,
                      send_block)
from .common import (INSUFFICIENT_Z, CheckStats, OutcomeMixin, bit_string,
                     check_threshold, to_bits)
from .errors import ConfigError
from .qubit import Basis, Pauli, Photon, Rng, apply_pauli, measure, prepare

STEP2 = "step2"
STEP5 = "step5"

PHOTONS_PER_BIT = 8


@dataclass(frozen=True)
class Protocol1Config:
    n: int
    check_threshold: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if int(self.n) < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "check_threshold",
                           check_threshold(self.check_threshold, "check_threshold"))


class CheckChoice(enum.Enum):
    REFLECT = "reflect"
    MEASURE_RESEND = "measure"


@dataclass(frozen=True)
class BobCheckChoice:
    position: int
    choice: CheckChoice
    result: int | None = None  # Bob's Z outcome for MEASURE_RESEND


@dataclass(frozen=True)
class Step2Check:
    reflect: CheckStats
    measure_resend: CheckStats

    @property
    def total(self) -> CheckStats:
        return self.reflect + self.measure_resend

    @property
    def rate(self) -> float:
        return self.total.rate


@dataclass(frozen=True)
class MessagePhotonRecord:
    position: int
    prepared: Photon
    initial_bit: int  # Bob's Z result
    bob_bit: int
    after_bob: Photon
    alice_bit: int
    after_alice: Photon
    final_bit: int


@dataclass(frozen=True)
class Protocol1Script:
    """Forced values for choices that are otherwise random (golden runs).

    ``message_positions`` must be Z-prepared positions that Bob keeps.
    """

    prepared: Sequence[Photon] | None = None
    check_positions: Sequence[int] | None = None
    message_positions: Sequence[int] | None = None


@dataclass
class Protocol1Outcome(OutcomeMixin):
    config: Protocol1Config
    transcript: Transcript
    actions: list[Action] = field(default_factory=list)
    knowledge: KnowledgeRecord = field(default_factory=KnowledgeRecord)
    aborted_at: str | None = None
    step2: Step2Check | None = None
    step5: CheckStats | None = None
    messages: list[MessagePhotonRecord] = field(default_factory=list)
    alice_decoded: str | None = None
    bob_decoded: str | None = None

    @property
    def check_error_rate_step2(self) -> float | None:
        return None if self.step2 is None else self.step2.rate

    @property
    def check_error_rate_step5(self) -> float | None:
        return None if self.step5 is None else self.step5.rate


def bob_check_phase(block: PhotonBlock, rng: Rng,
                    positions: Sequence[int] | None = None,
                    actions: list[Action] | None = None,
                    ) -> tuple[list[BobCheckChoice], PhotonBlock, list[int]]:
    """Bob's half of the round-trip check.

    Returns his choices (ascending position), the block he sends back in
    that order, and the positions he keeps.
    """
    size = len(block)
    if size % 2:
        raise ConfigError("check phase needs an even block")
    if positions is None:
        positions = rng.sample(range(size), size // 2)
    chosen = sorted(int(p) for p in positions)
    if len(set(chosen)) != size // 2 or not all(0 <= p < size for p in chosen):
        raise ConfigError(f"check positions must be {size // 2} distinct indices")
    log = actions if actions is not None else []
    choices, returned = [], []
    for pos in chosen:
        photon = block[pos]
        if rng.bit():
            result, _ = measure(photon, Basis.Z, rng)
            log.append(Action(BOB, "measure", Basis.Z))
            log.append(Action(BOB, "prepare", Basis.Z))
            choices.append(BobCheckChoice(pos, CheckChoice.MEASURE_RESEND, result))
            returned.append(prepare(Basis.Z, result))
        else:
            log.append(Action(BOB, "reflect"))
            choices.append(BobCheckChoice(pos, CheckChoice.REFLECT))
            returned.append(photon)
    chosen_set = set(chosen)
    kept = [p for p in range(size) if p not in chosen_set]
    return choices, PhotonBlock(tuple(returned), BOB), kept


def compute_step2_error_rate(prepared: Sequence[Photon],
                             choices: Sequence[BobCheckChoice],
                             remeasured: dict[int, int]) -> Step2Check:
    """Compare the returned check photons with Alice's preparations.

    Reflected photons are compared after Alice remeasures them in their
    preparation basis. Measure-resend photons count only when Alice
    prepared them in Z; then Bob's announced result and Alice's Z
    remeasurement must both equal the prepared bit.
    """
    reflect = CheckStats()
    mr = CheckStats()
    for ch in choices:
        p = prepared[ch.position]
        if ch.choice is CheckChoice.REFLECT:
            reflect += CheckStats(int(remeasured[ch.position] != p.bit), 1)
        elif p.basis is Basis.Z:
            wrong = ch.result != p.bit or remeasured[ch.position] != p.bit
            mr += CheckStats(int(wrong), 1)
    return Step2Check(reflect, mr)


def bob_encode_message(photon: Photon, b: int, rng: Rng) -> tuple[int, Photon]:
    """Measure in Z, then prepare a fresh ``|delta ^ b>``."""
    delta, _ = measure(photon, Basis.Z, rng)
    return delta, prepare(Basis.Z, delta ^ b)


def alice_encode(photon: Photon, a: int) -> Photon:
    return apply_pauli(photon, Pauli.for_bit(a))


def alice_encode_and_measure(photon: Photon, a: int, rng: Rng) -> int:
    """Apply I or sigma_x for ``a`` and read the result in Z.

    The caller publishes all final bits together in one announcement.
    """
    result, _ = measure(alice_encode(photon, a), Basis.Z, rng)
    return result


def decode(final_bit: int, known_bit: int, own_bit: int) -> int:
    return final_bit ^ known_bit ^ own_bit


def run_protocol1(cfg: Protocol1Config, msg_alice, msg_bob,
                  adversary: Adversary | None = None, *,
                  script: Protocol1Script | None = None,
                  rng: Rng | None = None) -> Protocol1Outcome:
    """Run one dialogue. Aborts are reported via ``outcome.aborted_at``."""
    n = cfg.n
    a_bits = to_bits(msg_alice, n, "msg_alice")
    b_bits = to_bits(msg_bob, n, "msg_bob")
    rng = rng if rng is not None else Rng(cfg.seed)
    script = script or Protocol1Script()
    eve = adversary if adversary is not None else Passive()
    transcript = Transcript(1, meta={"n": n, "check_threshold": cfg.check_threshold,
                                     "adversary": eve.name})
    eve.attach(transcript)
    actions: list[Action] = []
    out = Protocol1Outcome(cfg, transcript, actions, eve.knowledge)

    # Step 1: 8N random BB84 states, one block to Bob.
    total = PHOTONS_PER_BIT * n
    if script.prepared is not None:
        prepared = list(script.prepared)
        if len(prepared) != total:
            raise ConfigError(f"scripted preparation must have {total} photons")
    else:
        prepared = [prepare(rng.basis(), rng.bit()) for _ in range(total)]
    actions += [Action(ALICE, "prepare", p.basis) for p in prepared]
    actions.append(Action(ALICE, "send"))
    at_bob = send_block(PhotonBlock(tuple(prepared), ALICE), eve, rng,
                        transcript=transcript, leg="step1", receiver=BOB)

    # Step 2: reflect / measure-resend check on half the photons.
    choices, returned, kept = bob_check_phase(at_bob, rng, script.check_positions,
                                              actions)
    actions.append(Action(BOB, "send"))
    back = send_block(returned, eve, rng, transcript=transcript, leg="step2",
                      receiver=ALICE)
    transcript.announce(ALICE, "receipt", leg="step2")
    transcript.announce(
        BOB, "check_choices",
        reflect=[c.position for c in choices if c.choice is CheckChoice.REFLECT],
        measure=[c.position for c in choices if c.choice is CheckChoice.MEASURE_RESEND],
        results=[c.result for c in choices if c.choice is CheckChoice.MEASURE_RESEND])
    remeasured = {}
    for ch, photon in zip(choices, back):
        p = prepared[ch.position]
        if ch.choice is CheckChoice.REFLECT:
            basis = p.basis
        elif p.basis is Basis.Z:
            basis = Basis.Z
        else:
            continue
        remeasured[ch.position], _ = measure(photon, basis, rng)
        actions.append(Action(ALICE, "measure", basis))
    out.step2 = compute_step2_error_rate(prepared, choices, remeasured)
    passed = out.step2.total.passes(cfg.check_threshold)
    transcript.announce(ALICE, "check_result", phase=STEP2, passed=passed,
                        **out.step2.total.to_dict())
    if not passed:
        out.aborted_at = STEP2
        return out

    # Step 3: Alice reveals which kept photons are Z-basis.
    z_positions = [p for p in kept if prepared[p].basis is Basis.Z]
    transcript.announce(ALICE, "z_positions", positions=z_positions)
    if len(z_positions) < n:
        out.aborted_at = INSUFFICIENT_Z
        return out

    # Step 4: Bob encodes on N of them, shuffles his 4N photons, sends back.
    if script.message_positions is not None:
        msg_pos = [int(p) for p in script.message_positions]
        if len(msg_pos) != n or len(set(msg_pos)) != n or not set(msg_pos) <= set(z_positions):
            raise ConfigError("scripted message positions must be N distinct "
                              "Z-announced kept positions")
    else:
        msg_pos = sorted(rng.sample(z_positions, n))
    held = {p: at_bob[p] for p in kept}
    deltas, after_bob = [], []
    for p, b in zip(msg_pos, b_bits):
        delta, fresh = bob_encode_message(held[p], b, rng)
        actions.append(Action(BOB, "measure", Basis.Z, role="message"))
        actions.append(Action(BOB, "prepare", Basis.Z, role="message"))
        held[p] = fresh
        deltas.append(delta)
        after_bob.append(fresh)
    perm = Permutation.random(len(kept), rng)
    order = perm.apply(kept)  # original positions in outgoing order
    actions.append(Action(BOB, "reorder"))
    actions.append(Action(BOB, "send"))
    arrived = send_block(PhotonBlock(tuple(held[p] for p in order), BOB), eve, rng,
                         transcript=transcript, leg="step4", receiver=ALICE)

    # Step 5: Bob reveals the order; Alice checks the sample photons.
    transcript.announce(ALICE, "receipt", leg="step4")
    transcript.announce(BOB, "reorder", order=order, message_positions=msg_pos)
    restored = dict(zip(order, arrived))
    msg_set = set(msg_pos)
    sample = CheckStats()
    for p in kept:
        if p in msg_set:
            continue
        result, _ = measure(restored[p], prepared[p].basis, rng)
        actions.append(Action(ALICE, "measure", prepared[p].basis))
        sample += CheckStats(int(result != prepared[p].bit), 1)
    out.step5 = sample
    passed = sample.passes(cfg.check_threshold)
    transcript.announce(ALICE, "check_result", phase=STEP5, passed=passed,
                        **sample.to_dict())
    if not passed:
        out.aborted_at = STEP5
        return out

    # Step 6: Alice encodes, measures in Z and publishes; both decode.
    finals = []
    for i, (p, a) in enumerate(zip(msg_pos, a_bits)):
        encoded = alice_encode(restored[p], a)
        actions.append(Action(ALICE, "unitary", role="message"))
        final, _ = measure(encoded, Basis.Z, rng)
        actions.append(Action(ALICE, "measure", Basis.Z, role="message"))
        finals.append(final)
        out.messages.append(MessagePhotonRecord(
            position=p, prepared=prepared[p], initial_bit=deltas[i],
            bob_bit=b_bits[i], after_bob=after_bob[i], alice_bit=a,
            after_alice=encoded, final_bit=final))
    transcript.announce(ALICE, "final_states", bits=finals)
    out.bob_decoded = bit_string(decode(f, d, b) for f, d, b in zip(finals, deltas, b_bits))
    out.alice_decoded = bit_string(decode(f, prepared[p].bit, a)
                                   for f, p, a in zip(finals, msg_pos, a_bits))
    return out
