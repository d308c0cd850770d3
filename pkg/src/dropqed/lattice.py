"""Network geometry: qubit/line enumeration and per-qubit rate bookkeeping.

A network is a d-dimensional hyper-rectangular lattice of qubits sitting at
the intersections of one-dimensional waveguides.  Only the graph topology
matters: a qubit is addressed by its lattice coordinate (1-based along each
axis), and a "line" is the maximal 1-D chain of qubits a single waveguide
threads along one axis.

Conventions used throughout the package:

* axes (directions) are 0-based in code,
* qubit coordinates are 1-based lattice coordinates,
* linearization is row-major with axis 0 slowest; every matrix row/column
  index downstream depends on this ordering.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence

import numpy as np

QubitIndex = tuple[int, ...]


def linearize(dims: Sequence[int], coords: QubitIndex) -> int:
    """Row-major linear index (axis 0 slowest) of a 1-based coordinate."""
    i = 0
    for n, c in zip(dims, coords):
        i = i * n + (c - 1)
    return i


def delinearize(dims: Sequence[int], index: int) -> QubitIndex:
    """Inverse of :func:`linearize`."""
    coords = []
    for n in reversed(dims):
        coords.append(index % n + 1)
        index //= n
    return tuple(reversed(coords))


@dataclass(frozen=True)
class NoiseField:
    """Per-qubit, per-axis decay rates after fabrication disorder.

    ``rates[i, n]`` is the rate of the qubit with linear index ``i`` along
    axis ``n``, in the same units as the symmetric rates it perturbs.
    All stored rates are strictly positive.
    """

    dims: tuple[int, ...]
    rates: np.ndarray
    epsilon_max: float
    rng_seed: int

    def __post_init__(self) -> None:
        rates = np.asarray(self.rates, dtype=float)
        object.__setattr__(self, "rates", rates)
        n_qubits = int(np.prod(self.dims))
        if rates.shape != (n_qubits, len(self.dims)):
            raise ValueError(
                f"rates shape {rates.shape} does not match "
                f"({n_qubits}, {len(self.dims)})"
            )
        if not np.all(rates > 0):
            raise ValueError("all per-qubit rates must be > 0")
        rates.setflags(write=False)

    def rate(self, coords: QubitIndex, axis: int) -> float:
        return float(self.rates[linearize(self.dims, coords), axis])

    def mean_rate(self, axis: int) -> float:
        """Rate averaged over every qubit, for one axis."""
        return float(self.rates[:, axis].mean())

    def mean_rates(self) -> tuple[float, ...]:
        return tuple(self.mean_rate(n) for n in range(len(self.dims)))

    def line_means(self, axis: int) -> dict["LineId", float]:
        """Per-line mean rate along ``axis`` (diagnostic for seeding)."""
        out = {}
        for line in _lines(self.dims, axis):
            idx = [linearize(self.dims, q) for q in line.qubits(self.dims)]
            out[line] = float(self.rates[idx, axis].mean())
        return out


@dataclass(frozen=True)
class NetworkSpec:
    """A d-dimensional qubit network.

    Parameters
    ----------
    dims : qubits per axis, all >= 1.
    gammas : single-emitter decay rate per axis (units of a reference rate).
    theta : dimensionless propagation phase accumulated between adjacent
        qubits, in radians.
    noise : optional per-qubit rate field; absent means a symmetric network.
    """

    dims: tuple[int, ...]
    gammas: tuple[float, ...]
    theta: float
    noise: Optional[NoiseField] = None

    def __post_init__(self) -> None:
        dims = tuple(int(n) for n in self.dims)
        gammas = tuple(float(g) for g in self.gammas)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "theta", float(self.theta))
        if len(dims) < 1:
            raise ValueError("need at least one axis")
        if any(n < 1 for n in dims):
            raise ValueError("every axis must hold at least one qubit")
        if len(gammas) != len(dims):
            raise ValueError("gammas must have one entry per axis")
        if any(g <= 0 for g in gammas):
            raise ValueError("every rate must be > 0")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        if self.noise is not None and self.noise.dims != dims:
            raise ValueError("noise field dims do not match network dims")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def n_qubits(self) -> int:
        return int(np.prod(self.dims))

    @property
    def rate_sum(self) -> float:
        """Sum_n N_n * gamma_n; bounds every collective rate's modulus."""
        return float(sum(n * g for n, g in zip(self.dims, self.gammas)))

    def with_noise(self, noise: Optional[NoiseField]) -> "NetworkSpec":
        return replace(self, noise=noise)

    def resolved_rates(self) -> np.ndarray:
        """(N, d) per-qubit rates: the noise field, or broadcast symmetric rates."""
        if self.noise is not None:
            return self.noise.rates
        return np.tile(np.asarray(self.gammas), (self.n_qubits, 1))

    def effective_gammas(self) -> tuple[float, ...]:
        """Per-axis rates for Cartesian-sum estimates: qubit-averaged under noise."""
        if self.noise is None:
            return self.gammas
        return self.noise.mean_rates()


@dataclass(frozen=True, order=True)
class LineId:
    """One waveguide: the chain along ``direction`` at fixed transverse coords."""

    direction: int
    transverse: tuple[int, ...] = field(default=())

    def qubits(self, dims: Sequence[int]) -> list[QubitIndex]:
        """Qubits on this line, ordered by position along the axis."""
        out = []
        for j in range(1, dims[self.direction] + 1):
            c = list(self.transverse)
            c.insert(self.direction, j)
            out.append(tuple(c))
        return out


def enumerate_qubits(spec: NetworkSpec) -> list[QubitIndex]:
    """All qubit coordinates in row-major order (axis 0 slowest)."""
    return list(itertools.product(*[range(1, n + 1) for n in spec.dims]))


def _lines(dims: Sequence[int], axis: int) -> Iterator[LineId]:
    ranges = [range(1, dims[j] + 1) for j in range(len(dims)) if j != axis]
    for tv in itertools.product(*ranges):
        yield LineId(direction=axis, transverse=tv)


def enumerate_lines(spec: NetworkSpec, axis: int) -> list[LineId]:
    """All waveguides along ``axis`` (0-based); there are prod_{j != axis} N_j."""
    if not 0 <= axis < spec.ndim:
        raise ValueError(f"axis {axis} out of range for {spec.ndim} axes")
    return list(_lines(spec.dims, axis))


def sample_noise(spec: NetworkSpec, epsilon_max: float, seed: int) -> NoiseField:
    """Draw one Gaussian rate perturbation per (qubit, axis).

    Each rate is ``gamma_n * (1 + N(0, epsilon_max^2))``.  Draws that would
    make a rate non-positive are rejected and resampled (vanishingly rare for
    epsilon_max <= 0.2).  Streams are keyed by (seed, qubit linear index,
    axis) with a splittable counter-based generator, so the field is
    reproducible and independent of sampling order.
    """
    if epsilon_max < 0:
        raise ValueError("epsilon_max must be >= 0")
    n_qubits, d = spec.n_qubits, spec.ndim
    rates = np.empty((n_qubits, d))
    for i in range(n_qubits):
        for n in range(d):
            if epsilon_max == 0.0:
                rates[i, n] = spec.gammas[n]
                continue
            rng = np.random.Generator(
                np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(i, n)))
            )
            while True:
                val = spec.gammas[n] * (1.0 + epsilon_max * rng.standard_normal())
                if val > 0.0:
                    rates[i, n] = val
                    break
    return NoiseField(dims=spec.dims, rates=rates, epsilon_max=float(epsilon_max), rng_seed=int(seed))
