import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dropqed import (
    chain_rates,
    chain_rates_analytic,
    char_poly,
    coupling_matrix,
    lambda_residual,
    transfer_matrix,
)
from oracles import chain2_rates, chain3_rates, multiset_max_err

THETAS_50 = np.linspace(0.01, 1.99, 50) * np.pi


def test_transfer_matrix_identity_at_chi_zero():
    assert np.allclose(transfer_matrix(0.0, 0.0), np.eye(2))


def test_transfer_matrix_single_pole_entry():
    # chi = i makes 1 + i*chi vanish: the one-qubit pole
    s = transfer_matrix(1j, 0.7)
    assert abs(s[0, 0]) < 1e-15


def test_transfer_matrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        transfer_matrix(complex(np.inf, 0), 0.1)
    with pytest.raises(ValueError):
        transfer_matrix(1.0, np.nan)


def test_transfer_matrix_unit_determinant_bulk():
    rng = np.random.default_rng(7)
    chis = rng.standard_normal(10_000) + 1j * rng.standard_normal(10_000)
    thetas = rng.uniform(0, 2 * np.pi, 10_000)
    worst = max(
        abs(np.linalg.det(transfer_matrix(c, t)) - 1.0)
        for c, t in zip(chis, thetas)
    )
    assert worst <= 1e-12


@given(st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False),
       st.floats(-10, 10))
@settings(max_examples=200)
def test_transfer_matrix_unit_determinant_property(chi, theta):
    s = transfer_matrix(chi, theta)
    assert abs(np.linalg.det(s) - 1.0) <= 1e-10 * max(1.0, abs(chi) ** 2)


def test_char_poly_n1():
    theta = 0.37
    c = char_poly(1, theta)
    expected = np.exp(-1j * theta) * np.array([1.0, 1j])
    assert np.allclose(c, expected, atol=1e-15)


def test_char_poly_n2():
    theta = 0.81
    c = char_poly(2, theta)
    # (1 + i chi)^2 e^{-2 i theta} + chi^2
    e = np.exp(-2j * theta)
    expected = np.array([e, 2j * e, 1.0 - e])
    assert np.allclose(c, expected, atol=1e-14)


def test_char_poly_n2_roots_map_to_rates():
    theta = 0.81
    chi_roots = np.polynomial.polynomial.polyroots(char_poly(2, theta))
    z = np.sort_complex(1j / chi_roots)
    assert multiset_max_err(z, chain2_rates(theta)) < 1e-12


def test_chain_single_qubit():
    for theta in (0.0, 0.3, np.pi, 5.1):
        assert np.allclose(chain_rates(1, theta).z, [1.0])


def test_chain_examples_from_closed_forms():
    z = chain_rates(2, np.pi / 2).z
    assert multiset_max_err(z, [1 - 1j, 1 + 1j]) < 1e-12
    z = chain_rates(3, np.pi).z
    assert multiset_max_err(z, [3.0, 0.0, 0.0]) < 1e-12
    z = chain_rates(3, np.pi / 2).z
    expected = [(1 + 1j * np.sqrt(7)) / 2, (1 - 1j * np.sqrt(7)) / 2, 2.0]
    assert multiset_max_err(z, expected) < 1e-12


def test_analytic_values_at_theta_0_and_pi():
    assert multiset_max_err(chain_rates_analytic(2, 0.0).z, [0.0, 2.0]) < 1e-15
    assert multiset_max_err(chain_rates_analytic(2, np.pi).z, [2.0, 0.0]) < 1e-12
    assert multiset_max_err(chain_rates_analytic(3, np.pi).z, [0.0, 3.0, 0.0]) < 1e-12
    with pytest.raises(ValueError):
        chain_rates_analytic(4, 0.5)


@pytest.mark.parametrize("n", [2, 3])
def test_oracle_equivalence_50_thetas(n):
    oracle = chain2_rates if n == 2 else chain3_rates
    for theta in THETAS_50:
        err = multiset_max_err(chain_rates(n, theta).z, oracle(theta))
        assert err < 1e-10, f"n={n} theta={theta}"


@pytest.mark.parametrize("method", ["auto", "companion"])
def test_methods_agree_small_n(method):
    for n in (1, 2, 3, 5, 8):
        for theta in (0.3 * np.pi, 0.65 * np.pi, 1.3 * np.pi):
            a = chain_rates(n, theta, method="auto").z
            b = chain_rates(n, theta, method=method).z
            assert multiset_max_err(a, b) < 1e-9


def test_companion_handles_resonant_theta():
    # at theta = m*pi the leading coefficients degenerate; missing chi-roots
    # are exact dark rates
    z = chain_rates(4, np.pi, method="companion").z
    assert multiset_max_err(z, [0, 0, 0, 4]) < 1e-9


def test_trace_sum_rule_up_to_100():
    for n in range(1, 101):
        for frac in (0.1, 0.25, 0.5, 0.75, 0.9, 0.9999):
            z = chain_rates(n, frac * np.pi).z
            assert abs(z.sum() - n) <= 1e-9 * n


def test_passivity():
    for n in (2, 5, 20, 60, 100):
        for frac in (0.1, 0.5, 0.9, 0.9999, 1.0):
            z = chain_rates(n, frac * np.pi).z
            assert z.real.min() >= -1e-9


def test_conjugation_under_theta_flip():
    for n in (2, 7, 23):
        for frac in (0.2, 0.37, 0.9):
            theta = frac * np.pi
            a = chain_rates(n, -theta).z
            b = np.conj(chain_rates(n, theta).z)
            assert multiset_max_err(a, b) < 1e-9


def test_superradiance_limit_at_pi():
    for n in (2, 5, 17, 40):
        z = chain_rates(n, np.pi).z
        near_n = np.abs(z - n) < 1e-8
        near_0 = np.abs(z) < 1e-8
        assert near_n.sum() == 1
        assert near_0.sum() == n - 1


def test_coupling_matrix_matches_char_poly_roots():
    # two independent constructions of the same spectrum
    for n in (4, 7):
        theta = 0.42 * np.pi
        z_eig = np.linalg.eigvals(coupling_matrix(n, theta))
        chi = np.polynomial.polynomial.polyroots(char_poly(n, theta))
        assert multiset_max_err(z_eig, 1j / chi) < 1e-9


def test_chain_rates_against_multiprecision_oracle():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 50
    n, theta = 12, 0.7 * np.pi
    k = mp.matrix(n, n)
    for i in range(n):
        for j in range(n):
            k[i, j] = mp.e ** (1j * mp.mpf(theta) * abs(i - j))
    eigs, _ = mp.eig(k)
    oracle = [complex(v) for v in eigs]
    assert multiset_max_err(chain_rates(n, theta).z, oracle) < 1e-11


def test_lambda_residual_vanishes_at_poles():
    for n in range(1, 21):
        for frac in (0.3, 0.5, 0.65, 0.9999):
            for z in chain_rates(n, frac * np.pi).z:
                if abs(z) < 1e-12:
                    continue
                res = lambda_residual(n, frac * np.pi, z)
                assert res < 1e-8, f"n={n} frac={frac} z={z} res={res}"


def test_lambda_residual_single_qubit():
    assert lambda_residual(1, 0.77, 1.0) < 1e-10


def test_lambda_residual_rejects_non_poles():
    assert lambda_residual(2, np.pi / 2, 10 + 10j) > 1e-3
    assert lambda_residual(5, 0.3 * np.pi, 0.5 - 2.0j) > 1e-3


def test_lambda_residual_rejects_zero():
    with pytest.raises(ValueError):
        lambda_residual(3, np.pi, 0.0)
