import pytest

import oracles
from sqdsim.adversary import (BasisPolicy, FakeStateInjection, InterceptResend,
                              KnowledgeRecord, MeasureResend, Passive, guess_messages,
                              make_adversary)
from sqdsim.channel import ALICE, PhotonBlock
from sqdsim.errors import ConfigError
from sqdsim.protocol1 import Protocol1Config, run_protocol1
from sqdsim.protocol2 import Protocol2Config, run_protocol2
from sqdsim.qubit import MINUS, ONE, PLUS, ZERO, Basis, Rng

ALL_PAIRS = frozenset({(0, 0), (0, 1), (1, 0), (1, 1)})


class TestApply:
    def test_passive_identity_and_no_knowledge(self):
        block = PhotonBlock((ZERO, ONE, PLUS, MINUS), ALICE)
        eve = Passive()
        assert eve.apply(block, Rng(0), leg="step1") is block
        assert eve.knowledge.sizes() == {"measured": 0, "injected": 0, "intercepted": 0}

    def test_intercept_records_outcome(self):
        eve = InterceptResend(policy=BasisPolicy.ALWAYS_Z)
        (out,) = eve.apply(PhotonBlock((PLUS,), ALICE), Rng(2), leg="step1")
        (obs,) = eve.knowledge.observed_measurements
        assert obs.basis is Basis.Z and out.bit == obs.outcome and out.basis is Basis.Z

    def test_fake_injection_replaces_block(self):
        eve = FakeStateInjection(state=ZERO)
        block = PhotonBlock((ONE, PLUS, MINUS), ALICE)
        out = eve.apply(block, Rng(0), leg="step2")
        assert out.photons == (ZERO, ZERO, ZERO)
        assert eve.knowledge.intercepted_blocks == [("step2", block)]
        assert len(eve.knowledge.injected) == 3

    def test_legs_filter(self):
        eve = MeasureResend(basis=Basis.X, legs={"step4"})
        block = PhotonBlock((ZERO,), ALICE)
        assert eve.apply(block, Rng(0), leg="step1") is block
        assert eve.apply(block, Rng(0), leg="step4")[0].basis is Basis.X

    def test_uniform_random_policy_draws_both(self):
        rng = Rng(6)
        drawn = [BasisPolicy.UNIFORM_RANDOM.draw(rng) for _ in range(4000)]
        assert abs(drawn.count(Basis.Z) / 4000 - 0.5) < 3 * (0.25 / 4000) ** 0.5


class TestMakeAdversary:
    @pytest.mark.parametrize("spec,cls", [
        ("passive", Passive), (None, Passive), ("intercept-resend", InterceptResend),
        ("intercept-resend:z", InterceptResend), ("measure-resend:X", MeasureResend),
        ("fake:0", FakeStateInjection), ("fake:random,legs=step2", FakeStateInjection)])
    def test_parse(self, spec, cls):
        assert type(make_adversary(spec)) is cls

    def test_options(self):
        eve = make_adversary("intercept-resend:random,legs=step1+step4")
        assert eve.policy is BasisPolicy.UNIFORM_RANDOM
        assert eve.legs == frozenset({"step1", "step4"})
        assert make_adversary("fake:-").state == MINUS
        assert make_adversary("measure-resend:x").policy is BasisPolicy.ALWAYS_X

    @pytest.mark.parametrize("spec", ["nope", "intercept-resend:y", "fake:7",
                                      "passive:z", "fake:0,colour=red", "fake:0,1"])
    def test_bad(self, spec):
        with pytest.raises(ConfigError):
            make_adversary(spec)


class TestGuessMessages:
    @pytest.mark.parametrize("seed", range(5))
    def test_passive_protocol1_all_four(self, seed):
        out = run_protocol1(Protocol1Config(6, seed=seed), "010011", "110100")
        sets = guess_messages(out.knowledge, out.transcript, 1)
        assert sets == [ALL_PAIRS] * 6

    @pytest.mark.parametrize("seed", range(5))
    def test_passive_protocol2_all_four(self, seed):
        out = run_protocol2(Protocol2Config(6, seed=seed), "010011", "110100")
        assert guess_messages(out.knowledge, out.transcript, 2) == [ALL_PAIRS] * 6

    def test_leaked_initial_bit_halves_protocol1(self):
        out = run_protocol1(Protocol1Config(4, seed=3), "0101", "0011")
        deltas = [r.initial_bit for r in out.messages]
        out.transcript.announce("oracle", "leak", initial_bits=deltas)
        sets = guess_messages(None, out.transcript, 1)
        assert all(len(s) == 2 for s in sets)
        # enumeration with delta fixed: a ^ b = final ^ delta
        for s, r in zip(sets, out.messages):
            expected = {(a, b) for a in (0, 1) for b in (0, 1)
                        if a ^ b == r.final_bit ^ r.initial_bit}
            assert s == expected
            assert (r.alice_bit, r.bob_bit) in s

    def test_leaked_initial_bit_halves_protocol2(self):
        out = run_protocol2(Protocol2Config(4, seed=3), "0101", "0011")
        out.transcript.announce("oracle", "leak",
                                initial_bits=[p.first_bit for p in out.pairs])
        sets = guess_messages(None, out.transcript, 2)
        assert all(len(s) == 2 for s in sets)

    def test_z_measurement_on_return_leg_reveals_alice(self):
        # No thresholds to stop the run: Eve Z-measures Bob's fresh photons.
        # Fresh photons are Z states, so nothing is disturbed on that leg.
        for seed in range(20):
            eve = MeasureResend(basis=Basis.Z, legs={"step4"})
            out = run_protocol1(Protocol1Config(4, check_threshold=0.99, seed=seed),
                                "0110", "1010", eve)
            if out.aborted:
                continue
            sets = guess_messages(eve.knowledge, out.transcript, 1)
            for s, r in zip(sets, out.messages):
                assert (r.alice_bit, r.bob_bit) in s
                assert {a for a, _ in s} == {r.alice_bit}

    def test_truth_always_consistent_under_attacks(self):
        specs = ["intercept-resend:random", "measure-resend:Z", "measure-resend:X",
                 "fake:0", "fake:random", "fake:+"]
        for protocol, runner, cfg in [
                (1, run_protocol1, lambda s: Protocol1Config(3, 0.99, s)),
                (2, run_protocol2, lambda s: Protocol2Config(3, None, 0.99, 0.99, s))]:
            for spec in specs:
                for seed in range(15):
                    eve = make_adversary(spec)
                    rng = Rng(seed)
                    a, b = "".join(map(str, rng.bits(3))), "".join(map(str, rng.bits(3)))
                    out = runner(cfg(seed), a, b, eve)
                    if out.aborted:
                        continue
                    for i, s in enumerate(guess_messages(eve.knowledge, out.transcript,
                                                         protocol)):
                        assert (int(a[i]), int(b[i])) in s, (protocol, spec, seed)

    def test_aborted_run_has_no_positions(self):
        out = run_protocol2(Protocol2Config(16, seed=1), "0" * 16, "0" * 16,
                            FakeStateInjection(state=ONE, legs={"step2"}))
        assert out.aborted
        assert guess_messages(out.knowledge, out.transcript) == []


class TestDetectability:
    def test_intercept_random_reflected_error_quarter(self):
        expected = oracles.reflected_error_probability("random")
        assert expected == oracles.QUARTER
        errors = checked = 0
        seed = 0
        while checked < 10_000:
            out = run_protocol1(Protocol1Config(8, seed=seed), "0" * 8, "0" * 8,
                                InterceptResend(legs={"step1"}))
            errors += out.step2.reflect.errors
            checked += out.step2.reflect.checked
            seed += 1
        sigma = (0.25 * 0.75 / checked) ** 0.5
        assert abs(errors / checked - 0.25) <= 3 * sigma

    def test_fake_injection_protocol2_aborts(self):
        expected = oracles.protocol2_fake_abort_probability(16, 16)
        assert float(expected) > 0.999
        aborts = sum(run_protocol2(Protocol2Config(16, seed=s), "0" * 16, "1" * 16,
                                   FakeStateInjection(state=ZERO, legs={"step2"})).aborted
                     for s in range(300))
        assert aborts / 300 > 0.99
