"""Deterministic RNG primitives.

The generator is SplitMix64; the first outputs for seed 0 are pinned to
the published reference sequence so any change to the mixing constants
is caught immediately.
"""

import numpy as np

from cyclelife.rng import (
    SplitMix64,
    derive_seed,
    mix64,
    normal_stream,
    stream_u64,
    uniform_stream,
)

# Reference outputs of splitmix64 for seed 0.
SEED0_FIRST3 = (0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F)


def test_seed0_reference_vector():
    g = SplitMix64(0)
    assert tuple(g.next_u64() for _ in range(3)) == SEED0_FIRST3


def test_stream_matches_sequential_draws():
    g = SplitMix64(1234)
    seq = [g.next_u64() for _ in range(64)]
    assert stream_u64(1234, 64).tolist() == seq


def test_mix64_is_pure():
    assert mix64(42) == mix64(42)
    assert mix64(42) != mix64(43)


def test_derive_seed_depends_on_every_part():
    base = derive_seed(7, 1, 2)
    assert derive_seed(7, 1, 2) == base
    assert derive_seed(7, 2, 1) != base
    assert derive_seed(8, 1, 2) != base
    assert derive_seed(7, 1) != base


def test_uniform_bounds_and_determinism():
    u = uniform_stream(99, 10_000)
    assert u.shape == (10_000,)
    assert np.all(u >= 0.0) and np.all(u < 1.0)
    assert np.array_equal(u, uniform_stream(99, 10_000))
    # crude uniformity: mean near 1/2, no mass collapse
    assert abs(u.mean() - 0.5) < 0.02


def test_uniform_in_range():
    g = SplitMix64(5)
    vals = [g.uniform_in(2.0, 6.0) for _ in range(1000)]
    assert min(vals) >= 2.0 and max(vals) < 6.0


def test_randint_inclusive_bounds():
    g = SplitMix64(11)
    vals = {g.randint(3, 5) for _ in range(200)}
    assert vals == {3, 4, 5}


def test_below_is_unbiased_range():
    g = SplitMix64(17)
    vals = [g.below(7) for _ in range(2000)]
    assert set(vals) == set(range(7))


def test_normal_stream_moments():
    z = normal_stream(123, 50_000)
    assert abs(z.mean()) < 0.02
    assert abs(z.std() - 1.0) < 0.02


def test_permutation_is_a_permutation():
    g = SplitMix64(8)
    p = g.permutation(100)
    assert sorted(p.tolist()) == list(range(100))
    # same seed -> same order; different seed -> different order
    assert np.array_equal(SplitMix64(8).permutation(100), p)
    assert not np.array_equal(SplitMix64(9).permutation(100), p)


def test_shuffle_preserves_multiset():
    g = SplitMix64(3)
    a = np.arange(50)
    g.shuffle(a)
    assert sorted(a.tolist()) == list(range(50))


def test_sample_without_replacement_unique():
    g = SplitMix64(21)
    for _ in range(50):
        pick = g.sample_without_replacement(10, 4)
        assert len(set(pick.tolist())) == 4
        assert all(0 <= v < 10 for v in pick)
