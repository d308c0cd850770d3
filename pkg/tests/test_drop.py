import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dropqed import (
    NetworkSpec,
    SizeMismatchError,
    Spectrum,
    chain_rates,
    drop_spectrum,
    match_spectra,
    sample_noise,
)
from oracles import (
    cartesian_rate_multiset,
    chain3_rates,
    lattice_2x2_rates,
    lattice_3x3_rates,
    multiset_max_err,
)


def spec_of(dims, gammas, frac):
    return NetworkSpec(dims=tuple(dims), gammas=tuple(gammas), theta=frac * np.pi)


def test_2x2_all_sign_combinations():
    for g2 in (1.0, 0.4, 4.0):
        for frac in (0.0, 0.3, 0.5, 0.9999, 1.0):
            spec = spec_of([2, 2], (1.0, g2), frac)
            got = drop_spectrum(spec).rates
            want = lattice_2x2_rates(1.0, g2, spec.theta)
            assert multiset_max_err(got, want) < 1e-10


def test_3x3_closed_forms():
    for g2 in (0.4, 1.0, 2.7):
        for frac in (0.3, 0.5, 0.65, 0.9999):
            spec = spec_of([3, 3], (1.0, g2), frac)
            got = drop_spectrum(spec).rates
            want = lattice_3x3_rates(1.0, g2, spec.theta)
            assert multiset_max_err(got, want) < 1e-10


def test_2x3x4_at_pi_frozen_multiset():
    # per-axis rates at theta=pi are {0, N}; enumerate the sums by hand
    spec = spec_of([2, 3, 4], (1.0, 1.0, 1.0), 1.0)
    got = np.sort(drop_spectrum(spec).rates.real.round(9))
    want = np.sort([a + b + c
                    for a in (0, 2) for b in (0, 0, 3) for c in (0, 0, 0, 4)])
    assert np.allclose(got, want, atol=1e-9)
    values, counts = np.unique(want, return_counts=True)
    assert dict(zip(values.tolist(), counts.tolist())) == {
        0.0: 6, 2.0: 6, 3.0: 3, 4.0: 2, 5.0: 3, 6.0: 2, 7.0: 1, 9.0: 1,
    }


def test_d1_reduces_to_scaled_chain():
    gamma = 2.2
    spec = spec_of([5], (gamma,), 0.41)
    got = drop_spectrum(spec).rates
    want = gamma * chain_rates(5, spec.theta).z
    assert multiset_max_err(got, want) < 1e-12


def test_matches_bruteforce_enumeration():
    spec = spec_of([2, 3, 4], (1.0, 4.0, 2.0), 0.37)
    per_axis = [chain_rates(n, spec.theta).z for n in spec.dims]
    want = cartesian_rate_multiset(per_axis, spec.gammas)
    assert multiset_max_err(drop_spectrum(spec).rates, want) < 1e-12


def test_index_tuples_are_exhaustive_and_consistent():
    spec = spec_of([2, 3], (1.0, 0.4), 0.37)
    s = drop_spectrum(spec)
    assert s.index_tuples is not None
    assert len(set(s.index_tuples)) == 6
    assert set(s.index_tuples) == set(itertools.product((1, 2), (1, 2, 3)))
    per_axis = [chain_rates(n, spec.theta).z for n in spec.dims]
    for rate, tup in zip(s.rates, s.index_tuples):
        rebuilt = sum(g * per_axis[n][tup[n] - 1]
                      for n, g in enumerate(spec.gammas))
        assert abs(rate - rebuilt) < 1e-12


def test_trace_rule_exact():
    for dims, gammas in [([2, 2], (1.0, 0.4)), ([2, 3, 4], (1.0, 4.0, 2.0))]:
        spec = spec_of(dims, gammas, 0.63)
        total = drop_spectrum(spec).rates.sum()
        expected = spec.n_qubits * sum(spec.gammas)
        assert abs(total - expected) < 1e-10 * expected


def test_joint_permutation_invariance():
    base = spec_of([2, 3, 4], (1.0, 4.0, 2.0), 0.5)
    permuted = spec_of([4, 2, 3], (2.0, 1.0, 4.0), 0.5)
    a = drop_spectrum(base).rates
    b = drop_spectrum(permuted).rates
    assert multiset_max_err(a, b) < 1e-10


def test_scaling_covariance():
    spec = spec_of([3, 2], (1.0, 0.7), 0.44)
    c = 3.5
    scaled = spec_of([3, 2], (c * 1.0, c * 0.7), 0.44)
    a = drop_spectrum(spec).rates
    b = drop_spectrum(scaled).rates
    assert multiset_max_err(c * a, b) < 1e-10 * c


def test_noisy_spec_uses_averaged_rates():
    spec = spec_of([3, 2], (1.0, 3.0), 0.44)
    noisy = spec.with_noise(sample_noise(spec, 0.05, seed=9))
    got = drop_spectrum(noisy).rates
    eff = noisy.effective_gammas()
    want = drop_spectrum(spec_of([3, 2], eff, 0.44)).rates
    assert multiset_max_err(got, want) < 1e-12


def test_match_identical():
    s = drop_spectrum(spec_of([2, 3], (1.0, 0.4), 0.3))
    report = match_spectra(s, s, tol=1e-12)
    assert report.max_abs_error == 0.0
    assert report.mean_abs_error == 0.0
    assert report.passed
    assert sorted(i for i, _ in report.pairing) == list(range(6))
    assert sorted(j for _, j in report.pairing) == list(range(6))


def test_match_is_permutation_invariant():
    rates = np.array([1 + 1j, 1 + 1.0000001j, 5.0, -2j])
    a = Spectrum(rates=rates, method="x")
    b = Spectrum(rates=rates[::-1].copy(), method="y")
    report = match_spectra(a, b, tol=1e-12)
    assert report.max_abs_error == 0.0


def test_match_size_mismatch():
    a = Spectrum(rates=np.array([1.0 + 0j]), method="x")
    b = Spectrum(rates=np.array([1.0 + 0j, 2.0 + 0j]), method="y")
    with pytest.raises(SizeMismatchError):
        match_spectra(a, b, tol=1.0)


@given(st.lists(st.complex_numbers(max_magnitude=100, allow_nan=False,
                                   allow_infinity=False),
                min_size=1, max_size=12),
       st.randoms(use_true_random=False))
@settings(max_examples=60)
def test_match_any_permutation_is_exact(values, rnd):
    perm = values[:]
    rnd.shuffle(perm)
    report = match_spectra(np.array(values), np.array(perm), tol=0.0)
    assert report.max_abs_error <= 1e-9 * max(1.0, max(abs(v) for v in values))


def test_spectrum_validates_tuples():
    with pytest.raises(ValueError):
        Spectrum(rates=np.array([1.0 + 0j, 2.0 + 0j]), method="drop",
                 index_tuples=((1,),))
    with pytest.raises(ValueError):
        Spectrum(rates=np.array([1.0 + 0j, 2.0 + 0j]), method="drop",
                 index_tuples=((1,), (1,)))
