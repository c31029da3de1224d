import random

import pytest
from hypothesis import given, strategies as st

from sqdsim.qubit import (MINUS, ONE, PLUS, ZERO, Basis, Pauli, Photon, Rng,
                          apply_pauli, measure, parse_photon, prepare)

ALL = [ZERO, ONE, PLUS, MINUS]
photons = st.sampled_from(ALL)
bases = st.sampled_from(list(Basis))
seeds = st.integers(0, 2**64 - 1)


class TestPrepare:
    def test_encoding(self):
        assert prepare(Basis.Z, 0) == ZERO
        assert prepare(Basis.Z, 1) == ONE
        assert prepare(Basis.X, 1) == MINUS
        assert prepare(Basis.X, 0) == PLUS

    def test_labels_round_trip(self):
        for p in ALL:
            assert parse_photon(str(p)) is p
        assert str(MINUS) == "|->"

    def test_rejects_non_bits(self):
        with pytest.raises(ValueError):
            Photon(Basis.Z, 2)
        with pytest.raises(ValueError):
            parse_photon("|2>")


class TestMeasure:
    def test_matching_basis_is_deterministic(self):
        rng = Rng(1)
        assert measure(ZERO, Basis.Z, rng) == (0, ZERO)
        assert measure(PLUS, Basis.X, rng) == (0, PLUS)
        assert rng.draws == 0

    def test_mismatched_basis_collapses(self):
        rng = Rng(3)
        for _ in range(50):
            r, post = measure(PLUS, Basis.Z, rng)
            assert post == prepare(Basis.Z, r)

    def test_born_rule_frequency_million_trials(self):
        rng = Rng(12345)
        n = 10**6
        zeros = sum(1 for _ in range(n) if measure(PLUS, Basis.Z, rng)[0] == 0)
        assert abs(zeros / n - 0.5) <= 0.002

    @pytest.mark.parametrize("state,basis", [(PLUS, Basis.Z), (MINUS, Basis.Z),
                                             (ZERO, Basis.X), (ONE, Basis.X)])
    def test_born_rule_within_three_sigma(self, state, basis):
        rng = Rng(99)
        n = 20000
        zeros = sum(measure(state, basis, rng)[0] == 0 for _ in range(n))
        assert abs(zeros / n - 0.5) <= 3 * (0.25 / n) ** 0.5

    @given(photons, bases, seeds)
    def test_closure_and_idempotence(self, state, basis, seed):
        rng = Rng(seed)
        r1, post = measure(state, basis, rng)
        assert post in ALL
        r2, post2 = measure(post, basis, rng)
        assert (r2, post2) == (r1, post)


class TestPauli:
    def test_examples(self):
        assert apply_pauli(ONE, Pauli.I) == ONE
        assert apply_pauli(ZERO, Pauli.X) == ONE
        assert apply_pauli(MINUS, Pauli.X) == MINUS
        assert apply_pauli(PLUS, Pauli.X) == PLUS

    @given(photons)
    def test_sigma_x_is_involution(self, state):
        assert apply_pauli(apply_pauli(state, Pauli.X), Pauli.X) == state

    def test_encoding_convention(self):
        assert Pauli.for_bit(0) is Pauli.I and Pauli.for_bit(1) is Pauli.X


class TestRng:
    def test_mt19937_reference_vector(self):
        # First outputs of the reference mt19937ar.c with
        # init_by_array({0x123, 0x234, 0x345, 0x456}).
        rng = Rng.from_key([0x123, 0x234, 0x345, 0x456])
        assert [rng.next_u32() for _ in range(5)] == [
            1067595299, 955945823, 477289528, 4107218783, 4228976476]

    def test_seed_key_layout(self):
        seed = 0x0123456789ABCDEF
        rng = Rng(seed)
        mt = random.Random((seed & 0xFFFFFFFF) | (seed >> 32) << 32 | 1 << 64)
        assert [rng.next_u32() for _ in range(4)] == [mt.getrandbits(32) for _ in range(4)]

    def test_frozen_vectors(self):
        rng = Rng(0)
        assert [rng.next_u32() for _ in range(3)] == [4198958755, 3158798261, 1593907883]
        assert Rng(0).bits(16) == [1, 1, 0, 0, 0, 1, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0]
        rng = Rng(2024)
        assert rng.permutation(8) == [0, 7, 5, 3, 6, 4, 2, 1]
        assert rng.sample(range(10), 4) == [8, 6, 1, 0]
        assert rng.below(1000) == 496
        rng = Rng.for_trial(5, 3, 1)
        assert [rng.next_u32() for _ in range(3)] == [117798421, 1392702315, 2119621142]

    @given(seeds)
    def test_same_seed_same_trace(self, seed):
        a, b = Rng(seed), Rng(seed)
        assert a.permutation(20) == b.permutation(20)
        assert a.bits(10) == b.bits(10)
        assert a.draws == b.draws

    def test_trial_streams_differ(self):
        assert Rng.for_trial(1, 0).bits(64) != Rng.for_trial(1, 1).bits(64)
        assert Rng.for_trial(1, 0, 0).bits(64) != Rng.for_trial(1, 0, 1).bits(64)

    @given(st.integers(1, 200), seeds)
    def test_permutation_is_bijection(self, n, seed):
        assert sorted(Rng(seed).permutation(n)) == list(range(n))

    def test_below_uniform(self):
        rng = Rng(8)
        n = 60000
        counts = [0] * 6
        for _ in range(n):
            counts[rng.below(6)] += 1
        for c in counts:
            assert abs(c / n - 1 / 6) <= 3 * ((1 / 6) * (5 / 6) / n) ** 0.5

    def test_invalid(self):
        with pytest.raises(ValueError):
            Rng(-1)
        with pytest.raises(ValueError):
            Rng(2**64)
        with pytest.raises(ValueError):
            Rng(0).sample([1, 2], 3)
        with pytest.raises(ValueError):
            Rng(0).below(0)
