"""Acceptance criteria, one test each, checked at their stated tolerance and
time budget. Every test records a PASS/FAIL line via the ``acceptance``
fixture; the lines are repeated in the terminal summary."""

import time
from fractions import Fraction

import oracles
from sqdsim import golden
from sqdsim.adversary import FakeStateInjection, InterceptResend, make_adversary
from sqdsim.analysis import (ExperimentSpec, count_resources, efficiency,
                             formula_resources, leakage_audit, run_experiment)
from sqdsim.channel import BOB
from sqdsim.common import INSUFFICIENT_Z
from sqdsim.protocol1 import Protocol1Config, run_protocol1
from sqdsim.protocol2 import Protocol2Config, run_protocol2
from sqdsim.qubit import ZERO, Basis, Rng


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def finish(acceptance, number, name, ok, elapsed, limit, detail=""):
    within = elapsed < limit
    detail = f"{detail}; {elapsed:.2f}s (limit {limit}s)".lstrip("; ")
    acceptance(number, name, ok and within, detail)
    assert ok, detail
    assert within, f"took {elapsed:.2f}s, limit {limit}s"


def test_c01_table1(acceptance):
    with Timer() as t:
        results = golden.check_table1()
    ok = len(results) == 8 and all(r.ok for r in results)
    finish(acceptance, 1, "encoding table of the first protocol", ok, t.elapsed, 1,
           f"{sum(r.ok for r in results)}/8 rows")


def test_c02_table2(acceptance):
    with Timer() as t:
        results = golden.check_table2()
    ok = len(results) == 8 and all(r.ok for r in results)
    finish(acceptance, 2, "encoding table of the second protocol", ok, t.elapsed, 1,
           f"{sum(r.ok for r in results)}/8 rows")


def test_c03_example1(acceptance):
    with Timer() as t:
        out = golden.run_example1()
    after_bob = [str(r.after_bob) for r in out.messages]
    after_alice = [str(r.after_alice) for r in out.messages]
    ok = (not out.aborted
          and [str(r.prepared) for r in out.messages] == ["|0>", "|1>", "|0>", "|1>"]
          and after_bob == ["|0>", "|1>", "|1>", "|0>"]
          and after_alice == ["|0>", "|0>", "|1>", "|1>"]
          and out.alice_decoded == "0011" and out.bob_decoded == "0101")
    finish(acceptance, 3, "worked example, first protocol", ok, t.elapsed, 1,
           f"after Bob {after_bob}, after Alice {after_alice}")


def test_c04_example2(acceptance):
    with Timer() as t:
        out = golden.run_example2()
    pairs = [str(p) for pair in out.pairs for p in pair.photons()]
    ok = (not out.aborted
          and pairs == ["|0>", "|0>", "|1>", "|1>", "|0>", "|1>", "|1>", "|0>"]
          and out.alice_decoded == "0011" and out.ciphertexts == "0011"
          and out.bob_decoded == "0101")
    finish(acceptance, 4, "worked example, second protocol", ok, t.elapsed, 1,
           f"decoded {out.alice_decoded}, cipher {out.ciphertexts}, "
           f"decoded {out.bob_decoded}")


def test_c05_correctness_at_scale(acceptance):
    details = []
    ok = True
    with Timer() as t:
        for protocol in (1, 2):
            for n in (1, 8, 64):
                agg = run_experiment(ExperimentSpec(protocol, n, trials=1000,
                                                    seed=n)).aggregate
                good = agg["abort_rate"] == 0 and agg["recovery_accuracy"] == 1.0
                ok &= good
                details.append(f"P{protocol} N={n}: aborts={agg['abort_rate']:.3f} "
                               f"acc={agg['recovery_accuracy']} retries={agg['retries']}")
    finish(acceptance, 5, "passive correctness, 1000 runs x N in {1,8,64}", ok,
           t.elapsed, 30, "; ".join(details))


def test_c06_leakage(acceptance):
    positions = 0
    ok = True
    with Timer() as t:
        for n in range(1, 17):
            for seed in range(25):
                rng = Rng(seed)
                a, b = rng.bits(n), rng.bits(n)
                for runner, cfg in ((run_protocol1, Protocol1Config(n, seed=seed)),
                                    (run_protocol2, Protocol2Config(n, seed=seed))):
                    out = runner(cfg, a, b)
                    if out.aborted_at == INSUFFICIENT_Z:
                        continue
                    ent = leakage_audit(out.transcript, (out.bob_decoded,
                                                         out.alice_decoded))
                    ok &= not out.aborted and ent == [2.0] * n
                    positions += len(ent)
    finish(acceptance, 6, "public transcript leaves 2.0 bits per position", ok,
           t.elapsed, 10, f"{positions} positions audited")


def test_c07_efficiency(acceptance):
    ok = True
    with Timer() as t:
        for n in (1, 2, 3, 8, 16, 64):
            ok &= efficiency(1, n) == efficiency(2, n) == Fraction(2, 3)
            for protocol, runner, cfg in ((1, run_protocol1, Protocol1Config(n, seed=n)),
                                          (2, run_protocol2, Protocol2Config(n, seed=n))):
                out = runner(cfg, "1" * n, "0" * n)
                if out.aborted:
                    out = runner(type(cfg)(n, seed=n + 1000), "1" * n, "0" * n)
                ok &= count_resources(out) == formula_resources(protocol, n)
    finish(acceptance, 7, "efficiency 2/3, counted resources match", ok, t.elapsed, 1)


def test_c08_intercept_detection(acceptance):
    expected = oracles.reflected_error_probability("random")
    errors = checked = seed = 0
    with Timer() as t:
        while checked < 10_000:
            out = run_protocol1(Protocol1Config(8, seed=seed), "0" * 8, "0" * 8,
                                InterceptResend(legs={"step1"}))
            errors += out.step2.reflect.errors
            checked += out.step2.reflect.checked
            seed += 1
    rate = errors / checked
    ok = expected == Fraction(1, 4) and abs(rate - 0.25) <= 0.02
    finish(acceptance, 8, "intercept-resend reflected error rate", ok, t.elapsed, 60,
           f"oracle {expected}, observed {rate:.4f} over {checked} photons")


def test_c09_fake_injection(acceptance):
    ctrl = oracles.ctrl_categories_under_fake(("Z", 0))
    sift = oracles.sift_categories_under_fake(("Z", 0))
    expected = oracles.protocol2_fake_abort_probability(16, 16)
    oracle_ok = (ctrl[(True, True)] == Fraction(1, 4) and sift[(True, True)] == Fraction(1, 4)
                 and ctrl[(True, False)] == Fraction(1, 4))
    with Timer() as t:
        aborts = sum(run_protocol2(Protocol2Config(16, seed=s), "0" * 16, "1" * 16,
                                   FakeStateInjection(state=ZERO, legs={"step2"})).aborted
                     for s in range(1000))
    rate = aborts / 1000
    ok = oracle_ok and rate > 0.99
    finish(acceptance, 9, "fake |0> injection aborts", ok, t.elapsed, 60,
           f"oracle {float(expected):.5f}, observed {rate:.3f}")


def test_c10_classical_bob(acceptance):
    allowed1 = {("measure", Basis.Z), ("prepare", Basis.Z), ("reflect", None),
                ("reorder", None), ("send", None)}
    ok = True
    events = 0
    with Timer() as t:
        for spec in ("passive", "intercept-resend", "measure-resend:X", "fake:+"):
            for seed in range(40):
                n = 1 + seed % 6
                rng = Rng(seed)
                a, b = rng.bits(n), rng.bits(n)
                o1 = run_protocol1(Protocol1Config(n, seed=seed), a, b, make_adversary(spec))
                o2 = run_protocol2(Protocol2Config(n, seed=seed), a, b, make_adversary(spec))
                bob1 = [(x.kind, x.basis) for x in o1.actions if x.party == BOB]
                bob2 = [(x.kind, x.basis) for x in o2.actions if x.party == BOB]
                ok &= all(e in allowed1 for e in bob1)
                ok &= all(k != "measure" for k, _ in bob2)
                ok &= all(e in {("prepare", Basis.Z), ("reorder", None), ("send", None)}
                          for e in bob2)
                events += len(bob1) + len(bob2)
    finish(acceptance, 10, "Bob's trace stays classical", ok, t.elapsed, 5,
           f"{events} Bob events checked")


def test_c11_determinism(acceptance):
    specs = [ExperimentSpec(1, 8, trials=50, seed=11, adversary="intercept-resend"),
             ExperimentSpec(2, 8, m=12, trials=50, seed=11, adversary="fake:random"),
             ExperimentSpec(1, 1, trials=50, seed=2**40),
             ExperimentSpec(2, 4, trials=50, seed=5, adversary="measure-resend:Z")]
    ok = True
    with Timer() as t:
        for spec in specs:
            first = run_experiment(spec).to_json(timestamp=False).encode()
            second = run_experiment(spec).to_json(timestamp=False).encode()
            ok &= first == second
    finish(acceptance, 11, "same seed gives byte-identical reports", ok, t.elapsed, 10,
           f"{len(specs)} specs")
