import itertools

import numpy as np
import pytest

from dropqed import (
    NetworkSpec,
    ThetaOutOfRange,
    bic_condition_check,
    chain_rates,
    classify_superradiance,
    drop_spectrum,
    expected_cluster_counts,
    label_chain_rates,
    noise_study,
    subradiance_scaling,
)

from dropqed.analysis import _line_weights


def spec_of(dims, gammas=None, frac=1.0):
    gammas = gammas or (1.0,) * len(dims)
    return NetworkSpec(dims=tuple(dims), gammas=tuple(gammas), theta=frac * np.pi)


# ------------------------------------------------------- classification

def test_expected_counts_closed_form_small():
    assert expected_cluster_counts([2, 3, 4]) == {0: 6, 1: 11, 2: 6, 3: 1}
    assert expected_cluster_counts([2, 2]) == {0: 1, 1: 2, 2: 1}
    assert expected_cluster_counts([7]) == {0: 6, 1: 1}


def test_expected_counts_sum_to_n_up_to_100():
    for dims in itertools.chain(
        [(n,) for n in range(1, 101)],
        itertools.product(range(1, 7), repeat=2),
        itertools.product(range(1, 5), repeat=3),
    ):
        if np.prod(dims) > 100:
            continue
        counts = expected_cluster_counts(dims)
        assert sum(counts.values()) == int(np.prod(dims))


def test_classify_2x3x4():
    spec = spec_of([2, 3, 4], frac=0.9999)
    report = classify_superradiance(spec, drop_spectrum(spec))
    assert report.cluster_counts == {0: 6, 1: 11, 2: 6, 3: 1}


def test_classify_chain_limit():
    for n in (3, 9):
        spec = spec_of([n], frac=1.0)
        report = classify_superradiance(spec, drop_spectrum(spec))
        assert report.cluster_counts == {0: n - 1, 1: 1}


def test_classify_2x2_counts_and_centers():
    g1, g2 = 1.0, 0.4
    spec = spec_of([2, 2], (g1, g2), frac=1.0)
    report = classify_superradiance(spec, drop_spectrum(spec))
    assert report.cluster_counts == {0: 1, 1: 2, 2: 1}
    centers = report.cluster_centers
    assert abs(centers[()]) < 1e-12
    assert abs(centers[(0,)] - 2 * g1) < 1e-12
    assert abs(centers[(1,)] - 2 * g2) < 1e-12
    assert abs(centers[(0, 1)] - (2 * g1 + 2 * g2)) < 1e-12


def test_classify_counts_match_formula_generic():
    for dims in [(2, 2), (3, 4), (2, 3, 4), (4, 4, 2)]:
        spec = spec_of(list(dims), frac=0.9999)
        report = classify_superradiance(spec, drop_spectrum(spec))
        assert report.cluster_counts == expected_cluster_counts(dims)
        assert sum(report.cluster_counts.values()) == spec.n_qubits


def test_classify_theta_window():
    spec = spec_of([2, 2], frac=0.7)
    with pytest.raises(ThetaOutOfRange):
        classify_superradiance(spec, drop_spectrum(spec))


def test_classify_requires_index_tuples():
    spec = spec_of([2, 2], frac=1.0)
    from dropqed import Spectrum
    bare = Spectrum(rates=drop_spectrum(spec).rates, method="eigen")
    with pytest.raises(ValueError):
        classify_superradiance(spec, bare)


def test_classify_at_exact_resonance_limits():
    spec = spec_of([2, 3, 4], frac=1.0)
    s = drop_spectrum(spec)
    report = classify_superradiance(spec, s)
    gammas_sum = spec.rate_sum
    for rate, k in zip(s.rates, report.k_labels):
        if k == 0:
            assert abs(rate) <= 1e-9 * gammas_sum
        if k == spec.ndim:
            assert abs(rate - gammas_sum) <= 1e-9 * gammas_sum


def test_label_chain_rates():
    labelled = label_chain_rates(chain_rates(4, 0.9999 * np.pi))
    assert labelled.labels.count("superradiant") == 1
    assert labelled.labels.count("subradiant") == 3
    top = labelled.labels.index("superradiant")
    assert labelled.z.real[top] == labelled.z.real.max()


# ----------------------------------------------------------- scaling fits

def test_scaling_d2_slope_window():
    fit = subradiance_scaling(2, m_range=range(4, 11))
    assert -1.7 < fit.slope < -1.3
    assert len(fit.sizes) == 7


def test_scaling_needs_five_points():
    with pytest.raises(ValueError):
        subradiance_scaling(1, m_range=[10, 20, 30, 40])


def test_scaling_monotone_decreasing():
    fit = subradiance_scaling(3, m_range=range(2, 7))
    assert all(a > b for a, b in zip(fit.min_rates, fit.min_rates[1:]))


# ------------------------------------------------------------ bound states

def test_line_weight_rules():
    assert np.array_equal(_line_weights(4, "plain", 1), np.ones(4))
    assert np.array_equal(_line_weights(3, "alternating", 1), [1, -1, 1])
    assert np.array_equal(_line_weights(4, "qubit-parity", 1), np.ones(4))
    assert np.array_equal(_line_weights(3, "qubit-parity", 1), [1, -1, 1])
    assert np.array_equal(_line_weights(4, "phase-parity", 1), [1, -1, 1, -1])
    assert np.array_equal(_line_weights(4, "phase-parity", 2), np.ones(4))


def test_bic_two_qubit_chain():
    # null vector is symmetric: the alternating sum e1 - e2 vanishes, the
    # plain sum does not -- so the stated even-count rule is violated and
    # must be reported
    report = bic_condition_check(spec_of([2], frac=1.0), m=1)
    assert report.nullity == 1 == report.expected_nullity
    assert report.max_violation["alternating"] < 1e-8
    assert report.max_violation["phase-parity"] < 1e-8
    assert report.max_violation["qubit-parity"] > 0.1
    assert any(v.rule == "qubit-parity" for v in report.violations)


def test_bic_three_qubit_chain():
    # odd count: alternating rule, where stated and empirical rules agree
    report = bic_condition_check(spec_of([3], frac=1.0), m=1)
    assert report.nullity == 2 == report.expected_nullity
    assert report.max_violation["alternating"] < 1e-8
    assert report.max_violation["qubit-parity"] < 1e-8


def test_bic_2x3_nullity():
    report = bic_condition_check(spec_of([2, 3], frac=1.0), m=1)
    assert report.nullity == 2 == report.expected_nullity
    assert report.max_violation["phase-parity"] < 1e-8


def test_bic_even_m_uses_plain_sums():
    report = bic_condition_check(spec_of([3], frac=2.0), m=2)
    assert report.nullity == 2
    assert report.max_violation["plain"] < 1e-8
    assert report.max_violation["phase-parity"] < 1e-8
    # m even + odd count: the stated rule picks alternating and fails
    assert report.max_violation["qubit-parity"] > 0.1


def test_bic_requires_resonant_theta():
    with pytest.raises(ThetaOutOfRange):
        bic_condition_check(spec_of([2], frac=0.5), m=1)


# ------------------------------------------------------------ noise study

def test_noise_study_zero_epsilon_is_exact():
    spec = spec_of([2, 2], (1.0, 0.4), frac=0.65)
    result = noise_study(spec, 0.0, seed=0)
    assert result.recovered_count == 4
    assert result.unconverged == ()
    assert result.max_displacement < 1e-9


def test_noise_study_small_network():
    spec = spec_of([2, 2, 2], (1.0, 4.0, 2.0), frac=0.65)
    result = noise_study(spec, 0.05, seed=1)
    assert result.recovered_count == 8
    assert result.unconverged == ()
    assert result.max_displacement < 0.5 * spec.rate_sum
    assert np.all(np.isfinite(result.displacements))


def test_noise_study_seed_dependence():
    spec = spec_of([2, 2], (1.0, 2.0), frac=0.65)
    a = noise_study(spec, 0.05, seed=1)
    b = noise_study(spec, 0.05, seed=2)
    assert a.recovered_count == b.recovered_count == 4
    assert not np.allclose(a.refined_poles.rates, b.refined_poles.rates)
    again = noise_study(spec, 0.05, seed=1)
    assert np.array_equal(a.refined_poles.rates, again.refined_poles.rates)
