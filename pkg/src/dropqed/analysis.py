"""Physics analyses on network spectra.

Near the resonance condition theta = m*pi the spectrum organizes into
clusters labelled by how many axes contribute their superradiant 1-D rate;
this module classifies and counts those clusters, fits the size scaling of
the most subradiant rate, checks the bound-state sign-sum condition on
computed null spaces, and quantifies how well the Cartesian-sum estimates
survive per-qubit rate disorder.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import eom
from .chain1d import ChainSpectrum, chain_rates
from .drop import Spectrum, drop_spectrum
from .errors import MaxIterationsError, ThetaOutOfRange
from .lattice import LineId, NetworkSpec, enumerate_lines, linearize, sample_noise


@dataclass(frozen=True)
class SuperradianceReport:
    """Superradiance dimension k of every rate plus cluster statistics.

    ``k_labels[i]`` counts how many axes of rate i picked their axis's
    superradiant 1-D rate.  ``cluster_centers`` is keyed by the sorted tuple
    of those axes.
    """

    k_labels: tuple[int, ...]
    cluster_counts: dict[int, int]
    cluster_centers: dict[tuple[int, ...], complex]


@dataclass(frozen=True)
class ScalingFit:
    """Log-log fit of the most subradiant rate against qubit count."""

    sizes: tuple[int, ...]
    min_rates: tuple[float, ...]
    slope: float
    intercept: float


@dataclass(frozen=True)
class BicViolation:
    rule: str
    line: LineId
    vector: int
    value: float


@dataclass(frozen=True)
class BicReport:
    """Signed line sums of bound-state excitation amplitudes, per sign rule.

    Sign rules evaluated on every line and null vector:

    * ``"plain"``: all weights +1,
    * ``"alternating"``: +1, -1, ... anchored at the line's first qubit,
    * ``"qubit-parity"``: plain for an even qubit count, alternating for odd
      (the stated rule of the source analysis),
    * ``"phase-parity"``: plain for even m, alternating for odd m (the rule
      the computed null spaces actually satisfy).

    ``max_violation[rule]`` is the largest |sum| observed; ``violations``
    lists every (rule, line, vector) whose sum exceeded ``report_tol``.
    """

    m: int
    nullity: int
    expected_nullity: int
    rank_tol: float
    report_tol: float
    max_violation: dict[str, float]
    violations: tuple[BicViolation, ...]


@dataclass(frozen=True)
class NoiseStudyResult:
    """Cartesian-sum estimates vs refined poles of one disordered network."""

    epsilon_max: float
    seed: int
    drop_estimates: Spectrum
    refined_poles: Spectrum
    displacements: np.ndarray
    max_displacement: float
    median_displacement: float
    recovered_count: int
    unconverged: tuple[int, ...]


def expected_cluster_counts(dims: Sequence[int]) -> dict[int, int]:
    """Closed-form cluster sizes: count(k) = sum over k-subsets S of axes
    of prod_{n not in S} (N_n - 1)."""
    d = len(dims)
    counts = {k: 0 for k in range(d + 1)}
    for subset_size in range(d + 1):
        for subset in itertools.combinations(range(d), subset_size):
            counts[subset_size] += int(
                np.prod([dims[n] - 1 for n in range(d) if n not in subset])
            )
    return counts


def _distance_to_resonance(theta: float) -> float:
    return abs(theta / math.pi - round(theta / math.pi)) * math.pi


def label_chain_rates(chain: ChainSpectrum) -> ChainSpectrum:
    """Tag the maximal-real-part rate superradiant, the rest subradiant."""
    top = int(np.argmax(chain.z.real))
    labels = tuple("superradiant" if i == top else "subradiant" for i in range(chain.n))
    return ChainSpectrum(n=chain.n, theta=chain.theta, z=chain.z, labels=labels)


def classify_superradiance(spec: NetworkSpec, drop_spec: Spectrum,
                           window: float = 0.05 * math.pi) -> SuperradianceReport:
    """Assign each Cartesian-sum rate its superradiance dimension k.

    Valid near resonance (theta within ``window`` of a multiple of pi),
    where each axis has one well-separated maximal-real-part rate; k counts
    the axes whose index tuple entry selects that rate.  The partition needs
    the index tuples: it is not readable off the rate values alone.
    """
    if _distance_to_resonance(spec.theta) > window:
        raise ThetaOutOfRange(
            f"theta = {spec.theta:.6g} is {_distance_to_resonance(spec.theta):.3g} rad "
            f"from the nearest multiple of pi; clusters are ill-defined beyond "
            f"{window:.3g}"
        )
    if drop_spec.index_tuples is None:
        raise ValueError("classification requires a Cartesian-sum spectrum with index tuples")
    super_index = {}
    for n, size in enumerate(spec.dims):
        z = chain_rates(size, spec.theta).z
        super_index[n] = int(np.argmax(z.real)) + 1   # 1-based like the tuples
    k_labels = []
    clusters: dict[tuple[int, ...], list[complex]] = {}
    for rate, tup in zip(drop_spec.rates, drop_spec.index_tuples):
        axes = tuple(n for n in range(spec.ndim) if tup[n] == super_index[n])
        k_labels.append(len(axes))
        clusters.setdefault(axes, []).append(rate)
    counts: dict[int, int] = {k: 0 for k in range(spec.ndim + 1)}
    for k in k_labels:
        counts[k] += 1
    centers = {axes: complex(np.mean(vals)) for axes, vals in sorted(clusters.items())}
    return SuperradianceReport(
        k_labels=tuple(k_labels),
        cluster_counts=counts,
        cluster_centers=centers,
    )


_DEFAULT_SWEEPS = {1: range(10, 61, 5), 2: range(4, 13), 3: range(3, 8)}


def subradiance_scaling(d: int, theta: float = 0.9999 * math.pi,
                        m_range: Optional[Sequence[int]] = None,
                        zero_floor: float = 1e-13) -> ScalingFit:
    """Fit how the most subradiant rate decays with qubit count.

    Sweeps hyper-cubic networks [M]*d with unit rates, takes the smallest
    real part above ``zero_floor`` from the Cartesian-sum spectrum, and
    returns the log-log least-squares slope against N = M^d.  Near
    resonance the 1-D chain scales as N^-3, so the hyper-cubic slope is
    -3/d.  The floor only guards against exact dark states (which appear at
    theta = m*pi); at M = 60 and theta = 0.9999*pi the physical minimum is
    already ~6e-13, so the floor must stay below that.
    """
    if m_range is None:
        if d not in _DEFAULT_SWEEPS:
            raise ValueError(f"no default sweep for d = {d}; pass m_range")
        m_range = _DEFAULT_SWEEPS[d]
    m_values = list(m_range)
    if len(m_values) < 5:
        raise ValueError("scaling fit needs at least 5 sweep points")
    sizes, mins = [], []
    for m in m_values:
        spec = NetworkSpec(dims=(m,) * d, gammas=(1.0,) * d, theta=theta)
        rates = drop_spectrum(spec).rates.real
        alive = rates[rates > zero_floor]
        if len(alive) == 0:
            raise ValueError(f"no nonzero rates above the floor for M = {m}")
        sizes.append(m ** d)
        mins.append(float(alive.min()))
    slope, intercept = np.polyfit(np.log(np.asarray(sizes, float)), np.log(mins), 1)
    return ScalingFit(
        sizes=tuple(sizes),
        min_rates=tuple(mins),
        slope=float(slope),
        intercept=float(intercept),
    )


def _line_weights(count: int, rule: str, m: int) -> np.ndarray:
    alternating = np.array([(-1.0) ** j for j in range(count)])
    plain = np.ones(count)
    if rule == "plain":
        return plain
    if rule == "alternating":
        return alternating
    if rule == "qubit-parity":
        return plain if count % 2 == 0 else alternating
    if rule == "phase-parity":
        return plain if m % 2 == 0 else alternating
    raise ValueError(f"unknown sign rule {rule!r}")


def bic_condition_check(spec: NetworkSpec, m: int = 1, rank_tol: float = 1e-8,
                        report_tol: float = 1e-8) -> BicReport:
    """Evaluate the bound-state sign-sum condition on the computed null space.

    Requires theta = m*pi.  Extracts the null space of A(0), then for every
    line forms the signed sum of excitation amplitudes under each sign rule
    (see :class:`BicReport`).  Violations are reported, never suppressed:
    the stated qubit-count rule and the empirically correct phase-parity
    rule disagree for half the parity combinations, and this report is how
    that is made visible.
    """
    if abs(spec.theta - m * math.pi) > 1e-9:
        raise ThetaOutOfRange(
            f"bound-state check requires theta = {m}*pi, got {spec.theta:.12g}"
        )
    null = eom.nullity_at(spec, 0.0, rank_tol=rank_tol)
    expected = int(np.prod([n - 1 for n in spec.dims]))
    rules = ("plain", "alternating", "qubit-parity", "phase-parity")
    max_violation = {rule: 0.0 for rule in rules}
    violations: list[BicViolation] = []
    for axis in range(spec.ndim):
        for line in enumerate_lines(spec, axis):
            idx = [linearize(spec.dims, q) for q in line.qubits(spec.dims)]
            for vec in range(null.nullity):
                e = null.e_basis[:, vec]
                norm = np.linalg.norm(e)
                if norm == 0:
                    continue
                e = e / norm
                for rule in rules:
                    weights = _line_weights(len(idx), rule, m)
                    s = abs(np.dot(weights, e[idx]))
                    if s > max_violation[rule]:
                        max_violation[rule] = float(s)
                    if s > report_tol:
                        violations.append(BicViolation(rule=rule, line=line,
                                                       vector=vec, value=float(s)))
    return BicReport(
        m=m,
        nullity=null.nullity,
        expected_nullity=expected,
        rank_tol=rank_tol,
        report_tol=report_tol,
        max_violation=max_violation,
        violations=tuple(violations),
    )


def noise_study(spec: NetworkSpec, epsilon_max: float, seed: int,
                tol: float = 1e-10) -> NoiseStudyResult:
    """Perturb the per-qubit rates, then refine Cartesian-sum estimates.

    Samples one noise field, forms estimates from the qubit-averaged rates,
    and runs a singularity search on the disordered system from every
    estimate.  Each search starts with a simplex bounded by the local
    estimate spacing so neighbouring poles keep their own seeds; if two
    seeds still collapse onto one pole, the displaced one is deterministically
    retried with progressively smaller simplices.  Reports per-seed
    displacements, the number of distinct poles recovered, and which seeds
    (if any) failed to converge.
    """
    field = sample_noise(spec, epsilon_max, seed)
    noisy = spec.with_noise(field)
    estimates = drop_spectrum(noisy)
    system = eom._EomSystem(noisy)
    n = len(estimates)
    est = estimates.rates
    base_step = 0.01 * sum(noisy.effective_gammas())
    steps = np.full(n, base_step)
    if n > 1:
        gaps = np.abs(est[:, None] - est[None, :])
        np.fill_diagonal(gaps, np.inf)
        nearest = gaps.min(axis=1)
        steps = np.clip(0.35 * nearest / 2, 1e-4 * base_step, base_step)

    refined = np.full(n, np.nan, dtype=complex)
    unconverged: list[int] = []

    def refine(i: int, step: float) -> None:
        try:
            pole = eom._find_pole(system, est[i] / 2j, tol, step, 10000, "auto")
        except MaxIterationsError:
            if i not in unconverged:
                unconverged.append(i)
            return
        refined[i] = 2j * pole

    for i in range(n):
        refine(i, float(steps[i]))

    # collapse resolution: a pole claimed by several seeds keeps its closest
    # owner; each displaced owner re-searches a ring of local seeds around
    # its estimate (the missing pole sits at the same distance scale as the
    # one that captured the descent)
    dedup_tol = 1e-7 * spec.rate_sum

    def clusters() -> dict[int, list[int]]:
        groups: dict[int, list[int]] = {}
        reps: list[complex] = []
        for i in range(n):
            if np.isnan(refined[i]):
                continue
            for k, rep in enumerate(reps):
                if abs(refined[i] - rep) <= dedup_tol:
                    groups[k].append(i)
                    break
            else:
                reps.append(refined[i])
                groups[len(reps) - 1] = [i]
        return groups

    for _ in range(3):
        contested = [sorted(owners, key=lambda i: abs(refined[i] - est[i]))
                     for owners in clusters().values() if len(owners) > 1]
        if not contested:
            break
        taken = refined[~np.isnan(refined)]
        for owners in contested:
            for i in owners[1:]:
                r0 = abs(refined[i] - est[i])
                found = None
                for radius in (0.75 * r0, 1.25 * r0, 2.0 * r0):
                    for k in range(8):
                        cand = est[i] + radius * np.exp(2j * np.pi * k / 8)
                        try:
                            pole = eom._find_pole(system, cand / 2j, tol,
                                                  max(radius / 6, 1e-6), 10000, "auto")
                        except MaxIterationsError:
                            continue
                        gamma = 2j * pole
                        if not np.any(np.abs(taken - gamma) <= dedup_tol):
                            found = gamma
                            break
                    if found is not None:
                        break
                if found is not None:
                    refined[i] = found
                    taken = refined[~np.isnan(refined)]

    displacements = np.abs(refined - est)
    ok = ~np.isnan(displacements)
    distinct: list[complex] = []
    for g in refined[ok]:
        if not any(abs(g - u) <= dedup_tol for u in distinct):
            distinct.append(g)
    return NoiseStudyResult(
        epsilon_max=float(epsilon_max),
        seed=int(seed),
        drop_estimates=estimates,
        refined_poles=Spectrum(rates=refined[ok], method="cnm"),
        displacements=displacements,
        max_displacement=float(np.nanmax(displacements)) if ok.any() else math.nan,
        median_displacement=float(np.nanmedian(displacements)) if ok.any() else math.nan,
        recovered_count=len(distinct),
        unconverged=tuple(unconverged),
    )
