"""Command-line interface: config ingestion, dispatch, stable result emission.

Every command emits the same JSON schema::

    {"config": {...},
     "spectra": [{"method": ..., "rates": [{"re":, "im":, "tuple":, "k":}]}],
     "report": {...}}

or CSV with columns ``method,re,im,tuple,k``.  Rates are sorted by
(Re, Im) and printed with 12 significant digits, so repeated runs with the
same configuration (including the noise seed) are byte-identical.  Files
are written atomically (temp file + rename).

Exit codes: 0 success, 1 usage/config error, 2 validation failure,
3 solver failure.  The propagation phase is always entered as a multiple of
pi to avoid decimal transcription drift.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import analysis, eom
from .chain1d import chain_rates
from .drop import Spectrum, drop_spectrum, match_spectra
from .errors import ConfigError, DropQedError
from .lattice import NetworkSpec, sample_noise
from .render import render_scatter

_METHODS = ("drop", "eom-eig", "eom-cnm", "eom-det", "chain", "compare",
            "classify", "scaling", "noise", "bic")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_SOLVER = 3


@dataclass
class RunConfig:
    """One command's full configuration (mirrors the CLI surface)."""

    method: str
    dims: tuple[int, ...] = ()
    gammas: tuple[float, ...] = ()
    theta_over_pi: float = 0.5
    epsilon_max: Optional[float] = None
    noise_seed: Optional[int] = None
    match_tol: float = 1e-8          # relative to sum_n N_n gamma_n
    rank_tol: float = 1e-8
    solver_tol: float = 1e-10
    out_format: str = "json"
    output: Optional[str] = None
    svg_path: Optional[str] = None
    # per-command extras
    chain_n: Optional[int] = None
    eom_method: str = "eigen"
    theta_sweep: Optional[str] = None     # "start:stop:count" in units of pi
    scaling_d: Optional[int] = None
    m_min: Optional[int] = None
    m_max: Optional[int] = None
    m_step: int = 1
    zero_floor: float = 1e-13
    bic_m: int = 1

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if not math.isfinite(self.theta_over_pi):
            raise ConfigError("theta_over_pi must be finite")
        if self.out_format not in ("json", "csv"):
            raise ConfigError(f"unknown output format {self.out_format!r}")
        if self.epsilon_max is not None and self.epsilon_max < 0:
            raise ConfigError("epsilon_max must be >= 0")

    @property
    def theta(self) -> float:
        return self.theta_over_pi * math.pi

    def network(self) -> NetworkSpec:
        if not self.dims:
            raise ConfigError("this command needs --dims")
        gammas = self.gammas or (1.0,) * len(self.dims)
        if len(gammas) != len(self.dims):
            raise ConfigError(
                f"got {len(gammas)} rates for {len(self.dims)} axes"
            )
        try:
            spec = NetworkSpec(dims=self.dims, gammas=gammas, theta=self.theta)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.epsilon_max:
            spec = spec.with_noise(
                sample_noise(spec, self.epsilon_max, self.noise_seed or 0)
            )
        return spec

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "dims": list(self.dims),
            "gammas": [_sig(g) for g in (self.gammas or ())],
            "theta_over_pi": _sig(self.theta_over_pi),
            "noise": None if self.epsilon_max is None else
                {"epsilon_max": _sig(self.epsilon_max), "seed": self.noise_seed or 0},
            "tolerances": {
                "match_tol": _sig(self.match_tol),
                "rank_tol": _sig(self.rank_tol),
                "solver_tol": _sig(self.solver_tol),
            },
            "output": {
                "format": self.out_format,
                "path": self.output,
                "svg_path": self.svg_path,
            },
        }


def _sig(x: float) -> float:
    """Round to 12 significant digits (the emission precision)."""
    if x is None or not math.isfinite(x):
        return x
    return float(f"{x:.12g}")


def _spectrum_rows(s: Spectrum, k_labels: Optional[Sequence[int]] = None) -> list[dict]:
    order = np.lexsort((s.rates.imag, s.rates.real))
    rows = []
    for i in order:
        tup = list(s.index_tuples[i]) if s.index_tuples is not None else None
        k = int(k_labels[i]) if k_labels is not None else None
        rows.append({
            "re": _sig(float(s.rates[i].real)),
            "im": _sig(float(s.rates[i].imag)),
            "tuple": tup,
            "k": k,
        })
    return rows


def _emit(config: RunConfig, spectra: list[tuple[Spectrum, Optional[Sequence[int]]]],
          report: Optional[dict]) -> str:
    if config.out_format == "json":
        doc = {
            "config": config.as_dict(),
            "spectra": [
                {"method": s.method, "rates": _spectrum_rows(s, k)}
                for s, k in spectra
            ],
            "report": report,
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["method", "re", "im", "tuple", "k"])
    for s, k in spectra:
        for row in _spectrum_rows(s, k):
            tup = " ".join(str(v) for v in row["tuple"]) if row["tuple"] else ""
            writer.writerow([s.method, f"{row['re']:.12g}", f"{row['im']:.12g}",
                             tup, "" if row["k"] is None else row["k"]])
    return buf.getvalue()


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _eom_spectrum(spec: NetworkSpec, method: str, solver_tol: float) -> Spectrum:
    if method in ("eigen", "eig"):
        return eom.all_poles_eig(spec).poles
    if method == "cnm":
        return eom.all_poles_cnm(spec, tol=solver_tol).poles
    if method in ("det-interp", "det"):
        return eom.all_poles_det_interp(spec).poles
    raise ConfigError(f"unknown EoM method {method!r}")


def run(config: RunConfig) -> int:
    """Execute one configured command; returns the process exit code."""
    spectra: list[tuple[Spectrum, Optional[Sequence[int]]]] = []
    report: Optional[dict] = None
    svg_report = None
    code = EXIT_OK

    if config.method == "chain":
        if config.chain_n is None:
            raise ConfigError("chain needs --n")
        result = chain_rates(config.chain_n, config.theta)
        spectra.append((Spectrum(rates=result.z, method="chain"), None))

    elif config.method == "drop":
        spectra.append((drop_spectrum(config.network()), None))

    elif config.method in ("eom-eig", "eom-cnm", "eom-det"):
        method = {"eom-eig": "eigen", "eom-cnm": "cnm", "eom-det": "det-interp"}[config.method]
        spec = config.network()
        spectra.append((_eom_spectrum(spec, method, config.solver_tol), None))

    elif config.method == "compare":
        if config.theta_sweep:
            rows = []
            all_passed = True
            for frac in _parse_sweep(config.theta_sweep):
                swept = RunConfig(**{**config.__dict__, "theta_sweep": None,
                                     "theta_over_pi": float(frac)})
                spec = swept.network()
                match = match_spectra(
                    drop_spectrum(spec),
                    _eom_spectrum(spec, config.eom_method, config.solver_tol),
                    config.match_tol * spec.rate_sum,
                )
                rows.append({
                    "theta_over_pi": _sig(float(frac)),
                    "max_abs_error": _sig(match.max_abs_error),
                    "passed": match.passed,
                })
                all_passed = all_passed and match.passed
            report = {
                "sweep": rows,
                "worst_max_abs_error": _sig(max(r["max_abs_error"] for r in rows)),
                "passed": all_passed,
            }
            if not all_passed:
                code = EXIT_VALIDATION
        else:
            spec = config.network()
            a = drop_spectrum(spec)
            b = _eom_spectrum(spec, config.eom_method, config.solver_tol)
            tol = config.match_tol * spec.rate_sum
            match = match_spectra(a, b, tol)
            spectra.extend([(a, None), (b, None)])
            report = {
                "max_abs_error": _sig(match.max_abs_error),
                "mean_abs_error": _sig(match.mean_abs_error),
                "tol": _sig(tol),
                "passed": match.passed,
            }
            if not match.passed:
                code = EXIT_VALIDATION

    elif config.method == "classify":
        spec = config.network()
        a = drop_spectrum(spec)
        cls = analysis.classify_superradiance(spec, a)
        expected = analysis.expected_cluster_counts(spec.dims)
        spectra.append((a, cls.k_labels))
        svg_report = cls
        report = {
            "cluster_counts": {str(k): v for k, v in sorted(cls.cluster_counts.items())},
            "expected_counts": {str(k): v for k, v in sorted(expected.items())},
            "cluster_centers": {
                "+".join(str(a_) for a_ in axes) or "none":
                    {"re": _sig(c.real), "im": _sig(c.imag)}
                for axes, c in cls.cluster_centers.items()
            },
            "passed": cls.cluster_counts == expected,
        }
        if cls.cluster_counts != expected:
            code = EXIT_VALIDATION

    elif config.method == "scaling":
        d = config.scaling_d or (len(config.dims) if config.dims else None)
        if d is None:
            raise ConfigError("scaling needs --d")
        m_range = None
        if config.m_min is not None and config.m_max is not None:
            m_range = range(config.m_min, config.m_max + 1, config.m_step)
        fit = analysis.subradiance_scaling(d, config.theta, m_range,
                                           zero_floor=config.zero_floor)
        report = {
            "d": d,
            "sizes": list(fit.sizes),
            "min_rates": [_sig(v) for v in fit.min_rates],
            "slope": _sig(fit.slope),
            "intercept": _sig(fit.intercept),
        }

    elif config.method == "noise":
        base = RunConfig(**{**config.__dict__, "epsilon_max": None})
        spec = base.network()
        study = analysis.noise_study(spec, config.epsilon_max or 0.0,
                                     config.noise_seed or 0, tol=config.solver_tol)
        spectra.extend([(study.drop_estimates, None), (study.refined_poles, None)])
        report = {
            "epsilon_max": _sig(study.epsilon_max),
            "seed": study.seed,
            "recovered_count": study.recovered_count,
            "expected_count": spec.n_qubits,
            "max_displacement": _sig(study.max_displacement),
            "median_displacement": _sig(study.median_displacement),
            "unconverged_seeds": list(study.unconverged),
            "passed": study.recovered_count == spec.n_qubits,
        }
        if study.recovered_count != spec.n_qubits:
            code = EXIT_VALIDATION

    elif config.method == "bic":
        spec = config.network()
        bic = analysis.bic_condition_check(spec, m=config.bic_m,
                                           rank_tol=config.rank_tol)
        report = {
            "m": bic.m,
            "nullity": bic.nullity,
            "expected_nullity": bic.expected_nullity,
            "max_violation": {k: _sig(v) for k, v in bic.max_violation.items()},
            "violations": [
                {"rule": v.rule, "axis": v.line.direction,
                 "transverse": list(v.line.transverse), "vector": v.vector,
                 "value": _sig(v.value)}
                for v in bic.violations
            ],
            "passed": bic.nullity == bic.expected_nullity,
        }
        if bic.nullity != bic.expected_nullity:
            code = EXIT_VALIDATION

    text = _emit(config, spectra, report)
    if config.output:
        _write_atomic(config.output, text)
    else:
        sys.stdout.write(text)
    if config.svg_path:
        if not spectra:
            raise ConfigError("no spectra to render for --svg")
        svg = render_scatter([s for s, _ in spectra], report=svg_report)
        _write_atomic(config.svg_path, svg)
    return code


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad dims {text!r}: {exc}") from exc
    return dims


def _parse_gammas(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad gammas {text!r}: {exc}") from exc


def _parse_sweep(text: str) -> np.ndarray:
    try:
        start, stop, count = text.split(":")
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise ConfigError(f"bad theta sweep {text!r} (want start:stop:count): {exc}") from exc
    if len(values) < 1:
        raise ConfigError("theta sweep needs at least one point")
    return values


_CONFIG_FIELDS = {f for f in RunConfig.__dataclass_fields__ if f != "method"}


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path!r}: top level must be an object")
    out = {}
    for key, value in raw.items():
        if key == "method":
            continue
        if key not in _CONFIG_FIELDS:
            raise ConfigError(f"config {path!r}: unknown field {key!r}")
        if key == "dims":
            value = tuple(int(v) for v in value)
        elif key == "gammas":
            value = tuple(float(v) for v in value)
        out[key] = value
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dropqed",
        description="Collective decay rates of d-dimensional qubit networks.",
    )
    sub = parser.add_subparsers(dest="method", required=True)
    for name in _METHODS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--dims", help="qubits per axis, e.g. 5,3,4")
        p.add_argument("--gammas", help="rate per axis, e.g. 1,4,2 (default all 1)")
        p.add_argument("--theta-over-pi", type=float, help="phase as a multiple of pi")
        p.add_argument("--epsilon-max", type=float, help="noise level for the rates")
        p.add_argument("--noise-seed", type=int, help="noise RNG seed")
        p.add_argument("--match-tol", type=float,
                       help="relative match tolerance (times sum_n N_n gamma_n)")
        p.add_argument("--rank-tol", type=float, help="null-space rank tolerance")
        p.add_argument("--solver-tol", type=float, help="pole search tolerance")
        p.add_argument("--format", choices=("json", "csv"), dest="out_format")
        p.add_argument("--output", help="write results here (atomic)")
        p.add_argument("--svg", dest="svg_path", help="also render an SVG scatter")
        if name == "chain":
            p.add_argument("--n", type=int, dest="chain_n", help="chain length")
        if name == "compare":
            p.add_argument("--eom-method", choices=("eigen", "cnm", "det-interp"),
                           help="EoM route to compare against (default eigen)")
            p.add_argument("--theta-sweep", metavar="START:STOP:COUNT",
                           help="validate over a sweep of theta/pi values")
        if name == "scaling":
            p.add_argument("--d", type=int, dest="scaling_d", help="lattice dimension")
            p.add_argument("--m-min", type=int)
            p.add_argument("--m-max", type=int)
            p.add_argument("--m-step", type=int)
            p.add_argument("--zero-floor", type=float)
        if name == "bic":
            p.add_argument("--m", type=int, dest="bic_m", help="resonance order")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(_load_config_file(args.config))
    overrides = {
        "dims": _parse_dims(args.dims) if getattr(args, "dims", None) else None,
        "gammas": _parse_gammas(args.gammas) if getattr(args, "gammas", None) else None,
    }
    for name in ("theta_over_pi", "epsilon_max", "noise_seed", "match_tol",
                 "rank_tol", "solver_tol", "out_format", "output", "svg_path",
                 "chain_n", "eom_method", "theta_sweep", "scaling_d", "m_min",
                 "m_max", "m_step", "zero_floor", "bic_m"):
        overrides[name] = getattr(args, name, None)
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    try:
        return RunConfig(method=args.method, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        config = _config_from_args(args)
        return run(config)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DropQedError as exc:
        print(f"error: solver: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
