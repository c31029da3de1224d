"""Semi-quantum dialogue where classical Bob never measures.

Bob writes each bit ``b`` as a Z-basis pair ``|delta>|delta ^ b>``, hides the
pairs among Z-basis sample photons and Alice's N check (CTRL) photons, and
sends one shuffled block to Alice. Alice measures the check string ``psi``
in random bases, both sides compare (CTRL and Z-SIFT checks), then Alice
reads each pair in Z: their parity is ``b`` and the second photon is a
one-time pad for her own bit, ``c = a ^ theta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .adversary import Adversary, KnowledgeRecord, Passive
from .channel import (ALICE, BOB, Action, Permutation, PhotonBlock, Transcript,
                      send_block)
from .common import CheckStats, OutcomeMixin, bit_string, check_threshold, to_bits
from .errors import ConfigError, ProtocolError
from .qubit import Basis, Photon, Rng, measure, prepare

CTRL = "CTRL"
ZSIFT = "ZSIFT"


@dataclass(frozen=True)
class Protocol2Config:
    n: int
    m: int | None = None  # defaults to n
    p_ctrl: float = 0.05
    p_zsift: float = 0.05
    seed: int = 0

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        m = n if self.m is None else int(self.m)
        if m < n:
            raise ConfigError(f"m must be >= n, got m={m}, n={n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "p_ctrl", check_threshold(self.p_ctrl, "p_ctrl"))
        object.__setattr__(self, "p_zsift", check_threshold(self.p_zsift, "p_zsift"))


@dataclass(frozen=True)
class MessagePair:
    first_bit: int   # delta
    second_bit: int  # theta = delta ^ b

    @property
    def b(self) -> int:
        return self.first_bit ^ self.second_bit

    def photons(self) -> tuple[Photon, Photon]:
        return prepare(Basis.Z, self.first_bit), prepare(Basis.Z, self.second_bit)


@dataclass(frozen=True)
class PsiPartition:
    """Outgoing positions of the check string.

    ``ctrl_positions[j]`` carries Alice's j-th photon; ``sift_positions[k]``
    carries Bob's k-th SIFT sample.
    """

    ctrl_positions: tuple[int, ...]
    sift_positions: tuple[int, ...]


@dataclass(frozen=True)
class Slot:
    kind: str  # message | phi_sample | ctrl | sift
    index: int


@dataclass(frozen=True)
class Bookkeeping:
    """Identity of every outgoing position plus the shuffle used."""

    slots: tuple[Slot, ...]
    permutation: Permutation

    def positions(self, kind: str) -> list[int]:
        found = sorted((s.index, pos) for pos, s in enumerate(self.slots) if s.kind == kind)
        return [pos for _, pos in found]

    @property
    def psi(self) -> PsiPartition:
        return PsiPartition(tuple(self.positions("ctrl")), tuple(self.positions("sift")))

    @property
    def psi_positions(self) -> list[int]:
        return sorted(self.positions("ctrl") + self.positions("sift"))

    @property
    def message_positions(self) -> list[int]:
        """Outgoing positions of the 2N message photons in pair order."""
        return self.positions("message")


@dataclass(frozen=True)
class Protocol2Script:
    ctrl_prepared: Sequence[Photon] | None = None
    deltas: Sequence[int] | None = None
    permutation: Permutation | None = None


@dataclass
class Protocol2Outcome(OutcomeMixin):
    config: Protocol2Config
    transcript: Transcript
    actions: list[Action] = field(default_factory=list)
    knowledge: KnowledgeRecord = field(default_factory=KnowledgeRecord)
    aborted_at: str | None = None
    ctrl: CheckStats | None = None
    zsift: CheckStats | None = None
    pairs: list[MessagePair] = field(default_factory=list)
    bookkeeping: Bookkeeping | None = None
    readings: list[int] = field(default_factory=list)
    ciphertexts: str | None = None
    alice_decoded: str | None = None
    bob_decoded: str | None = None

    @property
    def ctrl_error_rate(self) -> float | None:
        return None if self.ctrl is None else self.ctrl.rate

    @property
    def zsift_error_rate(self) -> float | None:
        return None if self.zsift is None else self.zsift.rate


def bob_prepare_pairs(msg, rng: Rng, deltas: Sequence[int] | None = None) -> list[MessagePair]:
    bits = to_bits(msg, name="msg_bob")
    if deltas is None:
        deltas = [rng.bit() for _ in bits]
    deltas = to_bits(deltas, len(bits), "deltas")
    return [MessagePair(d, d ^ b) for d, b in zip(deltas, bits)]


def compose_and_shuffle(pairs: Sequence[MessagePair], samples: Sequence[Photon],
                        alice_block: PhotonBlock, rng: Rng,
                        permutation: Permutation | None = None,
                        ) -> tuple[PhotonBlock, Bookkeeping]:
    """Build ``phi`` and ``psi`` and shuffle all 5N+M photons together.

    Construction order is phi (2N samples, then the 2N message photons in
    pair order) followed by psi (N CTRL photons, then M SIFT samples).
    """
    n = len(pairs)
    if len(alice_block) != n:
        raise ConfigError("Alice's block must hold one photon per message bit")
    if len(samples) < 2 * n + n:
        raise ConfigError("need at least M + 2N samples with M >= N")
    if any(s.basis is not Basis.Z for s in samples):
        raise ConfigError("sample photons must be Z-basis states")
    photons: list[Photon] = []
    slots: list[Slot] = []
    for k in range(2 * n):
        photons.append(samples[k])
        slots.append(Slot("phi_sample", k))
    for i, pair in enumerate(pairs):
        first, second = pair.photons()
        photons += [first, second]
        slots += [Slot("message", 2 * i), Slot("message", 2 * i + 1)]
    for j, photon in enumerate(alice_block):
        photons.append(photon)
        slots.append(Slot("ctrl", j))
    for k, photon in enumerate(samples[2 * n:]):
        photons.append(photon)
        slots.append(Slot("sift", k))
    if permutation is None:
        permutation = Permutation.random(len(photons), rng)
    block = PhotonBlock(tuple(permutation.apply(photons)), BOB)
    return block, Bookkeeping(tuple(permutation.apply(slots)), permutation)


def alice_psi_measurements(photons: Sequence[Photon], rng: Rng) -> tuple[list[Basis], list[int]]:
    bases, results = [], []
    for photon in photons:
        basis = rng.basis()
        result, _ = measure(photon, basis, rng)
        bases.append(basis)
        results.append(result)
    return bases, results


def ctrl_check(prepared: Sequence[Photon], bases: Sequence[Basis],
               results: Sequence[int]) -> CheckStats:
    """Error rate over CTRL photons measured in their preparation basis."""
    stats = CheckStats()
    for p, basis, r in zip(prepared, bases, results):
        if basis is p.basis:
            stats += CheckStats(int(r != p.bit), 1)
    return stats


def zsift_check(bob_bits: Sequence[int], announced: Sequence[int]) -> CheckStats:
    if len(bob_bits) != len(announced):
        raise ProtocolError("Z-SIFT announcement does not match Bob's records")
    return CheckStats(sum(int(x != y) for x, y in zip(bob_bits, announced)), len(announced))


def alice_decode_and_encrypt(readings: Sequence[int], msg_alice) -> tuple[str, str]:
    """From Alice's Z readings of the 2N message photons (pair order),
    return Bob's message and the ciphertexts ``a ^ theta``."""
    readings = to_bits(readings, name="readings")
    a_bits = to_bits(msg_alice, len(readings) // 2, "msg_alice")
    if len(readings) % 2:
        raise ProtocolError("message photons must come in pairs")
    firsts, seconds = readings[0::2], readings[1::2]
    bob_msg = bit_string(x ^ y for x, y in zip(firsts, seconds))
    cipher = bit_string(a ^ theta for a, theta in zip(a_bits, seconds))
    return bob_msg, cipher


def bob_decrypt(ciphertexts, pairs: Sequence[MessagePair]) -> str:
    c_bits = to_bits(ciphertexts, name="ciphertexts")
    if len(c_bits) != len(pairs):
        raise ProtocolError(f"{len(c_bits)} ciphertext bits for {len(pairs)} pairs")
    return bit_string(c ^ p.second_bit for c, p in zip(c_bits, pairs))


def run_protocol2(cfg: Protocol2Config, msg_alice, msg_bob,
                  adversary: Adversary | None = None, *,
                  script: Protocol2Script | None = None,
                  rng: Rng | None = None) -> Protocol2Outcome:
    n, m = cfg.n, cfg.m
    a_bits = to_bits(msg_alice, n, "msg_alice")
    b_bits = to_bits(msg_bob, n, "msg_bob")
    rng = rng if rng is not None else Rng(cfg.seed)
    script = script or Protocol2Script()
    eve = adversary if adversary is not None else Passive()
    transcript = Transcript(2, meta={"n": n, "m": m, "p_ctrl": cfg.p_ctrl,
                                     "p_zsift": cfg.p_zsift, "adversary": eve.name})
    eve.attach(transcript)
    actions: list[Action] = []
    out = Protocol2Outcome(cfg, transcript, actions, eve.knowledge)

    # Step 1: N random BB84 states to Bob.
    if script.ctrl_prepared is not None:
        ctrl_prepared = list(script.ctrl_prepared)
        if len(ctrl_prepared) != n:
            raise ConfigError(f"scripted CTRL preparation must have {n} photons")
    else:
        ctrl_prepared = [prepare(rng.basis(), rng.bit()) for _ in range(n)]
    actions += [Action(ALICE, "prepare", p.basis) for p in ctrl_prepared]
    actions.append(Action(ALICE, "send"))
    at_bob = send_block(PhotonBlock(tuple(ctrl_prepared), ALICE), eve, rng,
                        transcript=transcript, leg="step1", receiver=BOB)

    # Step 2: pairs + samples, one shuffled block to Alice.
    out.pairs = bob_prepare_pairs(b_bits, rng, script.deltas)
    actions += [Action(BOB, "prepare", Basis.Z, role="message")] * (2 * n)
    samples = [prepare(Basis.Z, rng.bit()) for _ in range(m + 2 * n)]
    actions += [Action(BOB, "prepare", Basis.Z)] * len(samples)
    outgoing, book = compose_and_shuffle(out.pairs, samples, at_bob, rng,
                                         script.permutation)
    out.bookkeeping = book
    actions.append(Action(BOB, "reorder"))
    actions.append(Action(BOB, "send"))
    arrived = send_block(outgoing, eve, rng, transcript=transcript, leg="step2",
                         receiver=ALICE)

    # Step 3: Bob reveals psi; Alice measures it in random bases.
    psi_pos = book.psi_positions
    transcript.announce(BOB, "psi_positions", positions=psi_pos)
    bases, results = alice_psi_measurements([arrived[p] for p in psi_pos], rng)
    actions += [Action(ALICE, "measure", b) for b in bases]
    basis_at = dict(zip(psi_pos, bases))
    result_at = dict(zip(psi_pos, results))

    # Step 4: Bob reveals psi's internal order; Alice reveals her Z positions.
    part = book.psi
    transcript.announce(BOB, "psi_order", ctrl=part.ctrl_positions,
                        sift=part.sift_positions)
    transcript.announce(ALICE, "z_positions",
                        positions=[p for p in psi_pos if basis_at[p] is Basis.Z])

    # Step 5: CTRL check (Alice).
    out.ctrl = ctrl_check(ctrl_prepared,
                          [basis_at[p] for p in part.ctrl_positions],
                          [result_at[p] for p in part.ctrl_positions])
    passed = out.ctrl.passes(cfg.p_ctrl)
    transcript.announce(ALICE, "check_result", phase=CTRL, passed=passed,
                        **out.ctrl.to_dict())
    if not passed:
        out.aborted_at = CTRL
        return out

    # Step 6: Alice publishes Z-SIFT values; Bob checks them.
    zs_pos = [p for p in part.sift_positions if basis_at[p] is Basis.Z]
    zs_vals = [result_at[p] for p in zs_pos]
    transcript.announce(ALICE, "zsift_values", positions=zs_pos, bits=zs_vals)
    out.zsift = zsift_check([outgoing[p].bit for p in zs_pos], zs_vals)
    passed = out.zsift.passes(cfg.p_zsift)
    transcript.announce(BOB, "check_result", phase=ZSIFT, passed=passed,
                        **out.zsift.to_dict())
    if not passed:
        out.aborted_at = ZSIFT
        return out

    # Step 7: Bob reveals the message photons; Alice decodes and encrypts.
    msg_pos = book.message_positions
    transcript.announce(BOB, "message_order", positions=msg_pos)
    for p in msg_pos:
        reading, _ = measure(arrived[p], Basis.Z, rng)
        out.readings.append(reading)
        actions.append(Action(ALICE, "measure", Basis.Z, role="message"))
    out.alice_decoded, out.ciphertexts = alice_decode_and_encrypt(out.readings, a_bits)
    transcript.announce(ALICE, "ciphertexts", bits=to_bits(out.ciphertexts))
    out.bob_decoded = bob_decrypt(out.ciphertexts, out.pairs)
    return out
