"""Reference encoding tables and worked examples, re-derived by the simulator.

The expected values below are transcribed from the protocol tables; the
``check_*`` functions recompute them through the protocol operations and
report mismatches instead of raising, so the CLI can summarise them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .common import bit_string
from .protocol1 import (Protocol1Config, Protocol1Script, alice_encode,
                        alice_encode_and_measure, bob_encode_message, decode,
                        run_protocol1)
from .protocol2 import (Protocol2Config, Protocol2Script, alice_decode_and_encrypt,
                        bob_decrypt, bob_prepare_pairs, run_protocol2)
from .qubit import MINUS, ONE, PLUS, ZERO, Rng, parse_photon

# (prepared, Bob's bit, after Bob, Alice's bit, after Alice)
TABLE1 = [
    ("0", 0, "0", 0, "0"),
    ("0", 0, "0", 1, "1"),
    ("0", 1, "1", 0, "1"),
    ("0", 1, "1", 1, "0"),
    ("1", 0, "1", 0, "1"),
    ("1", 0, "1", 1, "0"),
    ("1", 1, "0", 0, "0"),
    ("1", 1, "0", 1, "1"),
]

# (Bob's bit, first photon, second photon, Alice's bit, ciphertext)
TABLE2 = [
    (0, "0", "0", 0, 0),
    (0, "0", "0", 1, 1),
    (0, "1", "1", 0, 1),
    (0, "1", "1", 1, 0),
    (1, "0", "1", 0, 1),
    (1, "0", "1", 1, 0),
    (1, "1", "0", 0, 0),
    (1, "1", "0", 1, 1),
]

EXAMPLE_MSG_BOB = "0011"
EXAMPLE_MSG_ALICE = "0101"
EXAMPLE1_CARRIERS = "0101"
EXAMPLE1_AFTER_BOB = "0110"
EXAMPLE1_AFTER_ALICE = "0011"
EXAMPLE2_PAIRS = "00110110"
EXAMPLE2_CIPHERTEXT = "0011"


@dataclass(frozen=True)
class GoldenResult:
    name: str
    ok: bool
    expected: object
    actual: object


def check_table1() -> list[GoldenResult]:
    results = []
    rng = Rng(0)
    for i, (prep, b, after_b, a, after_a) in enumerate(TABLE1):
        photon = parse_photon(prep)
        delta, fresh = bob_encode_message(photon, b, rng)
        encoded = alice_encode(fresh, a)
        final = alice_encode_and_measure(fresh, a, rng)
        bob_reads = decode(final, delta, b)
        alice_reads = decode(final, photon.bit, a)
        actual = (prep, b, fresh.label, a, encoded.label)
        ok = (actual == (prep, b, after_b, a, after_a) and final == int(after_a)
              and bob_reads == a and alice_reads == b)
        results.append(GoldenResult(f"table1[{i}]", ok, (prep, b, after_b, a, after_a),
                                    actual))
    return results


def check_table2() -> list[GoldenResult]:
    results = []
    rng = Rng(0)
    for i, (b, first, second, a, c) in enumerate(TABLE2):
        (pair,) = bob_prepare_pairs([b], rng, deltas=[int(first)])
        p1, p2 = pair.photons()
        bob_msg, cipher = alice_decode_and_encrypt([p1.bit, p2.bit], [a])
        bob_reads = bob_decrypt(cipher, [pair])
        actual = (b, p1.label, p2.label, a, int(cipher))
        ok = (actual == (b, first, second, a, c) and bob_msg == str(b)
              and bob_reads == str(a))
        results.append(GoldenResult(f"table2[{i}]", ok, (b, first, second, a, c), actual))
    return results


def example1_script(n: int = 4) -> Protocol1Script:
    """Carriers forced to |0>,|1>,|0>,|1>; Bob checks the first half."""
    filler = [ZERO, PLUS, ONE, MINUS]
    prepared = [filler[i % 4] for i in range(4 * n)]
    prepared += [parse_photon(x) for x in EXAMPLE1_CARRIERS]
    prepared += [filler[(i + 1) % 4] for i in range(4 * n - n)]
    return Protocol1Script(prepared=prepared, check_positions=range(4 * n),
                           message_positions=range(4 * n, 5 * n))


def run_example1(seed: int = 0):
    return run_protocol1(Protocol1Config(4, seed=seed), EXAMPLE_MSG_ALICE,
                         EXAMPLE_MSG_BOB, script=example1_script())


def check_example1(seed: int = 0) -> list[GoldenResult]:
    out = run_example1(seed)
    after_bob = "".join(r.after_bob.label for r in out.messages)
    after_alice = "".join(r.after_alice.label for r in out.messages)
    carriers = "".join(r.prepared.label for r in out.messages)
    return [
        GoldenResult("example1.completed", out.aborted_at is None, None, out.aborted_at),
        GoldenResult("example1.carriers", carriers == EXAMPLE1_CARRIERS,
                     EXAMPLE1_CARRIERS, carriers),
        GoldenResult("example1.after_bob", after_bob == EXAMPLE1_AFTER_BOB,
                     EXAMPLE1_AFTER_BOB, after_bob),
        GoldenResult("example1.after_alice", after_alice == EXAMPLE1_AFTER_ALICE,
                     EXAMPLE1_AFTER_ALICE, after_alice),
        GoldenResult("example1.alice_decoded", out.alice_decoded == EXAMPLE_MSG_BOB,
                     EXAMPLE_MSG_BOB, out.alice_decoded),
        GoldenResult("example1.bob_decoded", out.bob_decoded == EXAMPLE_MSG_ALICE,
                     EXAMPLE_MSG_ALICE, out.bob_decoded),
    ]


def run_example2(seed: int = 0):
    deltas = [int(EXAMPLE2_PAIRS[2 * i]) for i in range(len(EXAMPLE_MSG_BOB))]
    return run_protocol2(Protocol2Config(4, seed=seed), EXAMPLE_MSG_ALICE,
                         EXAMPLE_MSG_BOB, script=Protocol2Script(deltas=deltas))


def check_example2(seed: int = 0) -> list[GoldenResult]:
    out = run_example2(seed)
    pairs = "".join(p.label for pair in out.pairs for p in pair.photons())
    readings = bit_string(out.readings)
    return [
        GoldenResult("example2.completed", out.aborted_at is None, None, out.aborted_at),
        GoldenResult("example2.pairs", pairs == EXAMPLE2_PAIRS, EXAMPLE2_PAIRS, pairs),
        GoldenResult("example2.readings", readings == EXAMPLE2_PAIRS, EXAMPLE2_PAIRS,
                     readings),
        GoldenResult("example2.alice_decoded", out.alice_decoded == EXAMPLE_MSG_BOB,
                     EXAMPLE_MSG_BOB, out.alice_decoded),
        GoldenResult("example2.ciphertext", out.ciphertexts == EXAMPLE2_CIPHERTEXT,
                     EXAMPLE2_CIPHERTEXT, out.ciphertexts),
        GoldenResult("example2.bob_decoded", out.bob_decoded == EXAMPLE_MSG_ALICE,
                     EXAMPLE_MSG_ALICE, out.bob_decoded),
    ]


def check_all() -> list[GoldenResult]:
    return check_table1() + check_table2() + check_example1() + check_example2()
