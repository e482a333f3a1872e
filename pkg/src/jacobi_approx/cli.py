"""Command-line frontend: config parsing and validation, dispatch, cached
error sequences, CSV and summary reports.

Config files are flat ``key = value`` text (``#`` comments allowed); keys
mirror the long CLI flags with underscores.  Flags override file values.
Exit codes: 0 pass, 1 inequality-check failure, 2 computational
non-convergence, 3 config error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from . import harness
from .exceptions import (ConvergenceError, JacobiApproxError, ParameterError,
                         PreconditionError, SolverStallError)
from .functions import corpus_by_name, corpus_catalog
from .weights import WeightParams
from . import bestapprox, moduli, quadrature

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_NONCONVERGED = 2
EXIT_CONFIG = 3

CACHE_ENV = "JACOBI_APPROX_CACHE"

COMMANDS = ("modulus", "best-approx", "error-seq", "verify-direct",
            "verify-inverse", "verify-inverse-smallp", "verify-whitney",
            "verify-appendix", "fit-decay", "report")

# settings that participate in the cache key: a change invalidates entries
SOLVER_SETTINGS = {
    "quad_tol": quadrature.DEFAULT_TOL,
    "minimax_rel": bestapprox.MINIMAX_REL,
    "irls_rel": bestapprox.IRLS_REL,
    "irls_floor": bestapprox.IRLS_FLOOR,
}


@dataclass
class RunConfig:
    command: str
    fns: list = field(default_factory=lambda: ["abs"])
    alpha: float = 0.0
    beta: float = 0.0
    p: float = 2.0
    k: int = 2
    r: int = 0
    t: float = 0.5
    t_grid: list = field(default_factory=lambda: [2.0 ** -j for j in range(1, 7)])
    n: int = 4
    n_min: int = 2
    n_max: int = 32
    big_n: int = 1
    m: int = 2
    c_hat: float = 1.0
    theta: float = 1.0
    samples: int = 64
    seed: int = 0
    averaged: bool = False
    x0: float | None = None
    h: float | None = None
    out: str = "report"
    cache: str | None = None

    def params(self) -> WeightParams:
        return WeightParams(self.alpha, self.beta, self.p)

    def specs(self):
        return [corpus_by_name(name) for name in self.fns]


def _parse_value(raw: str):
    raw = raw.strip()
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("inf", "infinity"):
        return math.inf
    if "," in raw:
        return [_parse_value(tok) for tok in raw.split(",") if tok.strip()]
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def parse_config_file(path: str) -> dict:
    """Flat key = value lines; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, _, raw = line.partition("=")
            out[key.strip().replace("-", "_")] = _parse_value(raw)
    return out


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="jacobi-approx",
        description="Jacobi-weighted approximation: moduli of smoothness, "
                    "best-approximation errors, and inequality verification.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, with_kr=True):
        sp.add_argument("--config", help="config file (flat key = value)")
        sp.add_argument("--fn", action="append", dest="fns", metavar="NAME",
                        help="corpus function (repeatable); see --list-fns")
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--p", type=str, help="integrability index; 'inf' allowed")
        if with_kr:
            sp.add_argument("--k", type=int)
            sp.add_argument("--r", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output path prefix (CSV + summary)")
        sp.add_argument("--cache", help=f"cache directory (or ${CACHE_ENV})")

    sp = sub.add_parser("modulus", help="weighted (or averaged) modulus at t")
    common(sp)
    sp.add_argument("--t", type=float)
    sp.add_argument("--averaged", action="store_true", default=None)

    sp = sub.add_parser("best-approx", help="E_n on [-1,1] or a local interval")
    common(sp, with_kr=False)
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--x0", type=float, help="local interval center")
    sp.add_argument("--h", type=float, help="local interval step")

    sp = sub.add_parser("error-seq", help="E_n over an n-range (cached)")
    common(sp, with_kr=False)
    sp.add_argument("--n-min", type=int)
    sp.add_argument("--n-max", type=int)

    sp = sub.add_parser("verify-direct", help="Jackson-type direct inequality")
    common(sp)
    sp.add_argument("--n-min", type=int)
    sp.add_argument("--n-max", type=int)

    sp = sub.add_parser("verify-inverse", help="inverse inequality, 1 <= p <= inf")
    common(sp)
    sp.add_argument("--N", dest="big_n", type=int)
    sp.add_argument("--t-grid", type=str)
    sp.add_argument("--n-max", type=int)

    sp = sub.add_parser("verify-inverse-smallp", help="inverse inequality, 0<p<1")
    common(sp)
    sp.add_argument("--c-hat", type=float)
    sp.add_argument("--n-min", type=int)
    sp.add_argument("--n-max", type=int)

    sp = sub.add_parser("verify-whitney", help="Whitney-type local estimates")
    common(sp)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--samples", type=int)

    sp = sub.add_parser("verify-appendix", help="sharp Marchaud/Jackson corollaries")
    common(sp)
    sp.add_argument("--m", type=int)
    sp.add_argument("--t-grid", type=str)
    sp.add_argument("--n-max", type=int)

    sp = sub.add_parser("fit-decay", help="fit E_n ~ n^-gamma and cross-check")
    common(sp)
    sp.add_argument("--n-min", type=int)
    sp.add_argument("--n-max", type=int)

    sp = sub.add_parser("report", help="run the default verification battery")
    common(sp)
    return ap


def load_config(argv=None) -> RunConfig:
    """Parse flags (and an optional --config file; flags win) into a
    validated RunConfig."""
    ns = _build_parser().parse_args(argv)
    values = {}
    if getattr(ns, "config", None):
        values.update(parse_config_file(ns.config))
    for key, val in vars(ns).items():
        if key == "config" or val is None:
            continue
        values[key] = val
    if "p" in values and isinstance(values["p"], str):
        values["p"] = math.inf if values["p"].lower() in ("inf", "infinity") \
            else float(values["p"])
    if "t_grid" in values and isinstance(values["t_grid"], str):
        values["t_grid"] = [float(tok) for tok in values["t_grid"].split(",")]
    if "fns" in values and isinstance(values["fns"], str):
        values["fns"] = [values["fns"]]
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig(**values)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig):
    """Check J_p membership and the preconditions of the requested theorem;
    failures name the violated precondition."""
    if cfg.command not in COMMANDS:
        raise ParameterError(f"unknown command {cfg.command!r}")
    try:
        params = cfg.params()
    except ParameterError as exc:
        raise ParameterError(f"weight parameters rejected: {exc}") from exc
    for name in cfg.fns:
        corpus_by_name(name)  # KeyError -> config error in main()
    if cfg.command in ("modulus", "verify-direct", "verify-inverse",
                       "verify-whitney", "verify-appendix"):
        if cfg.k < 1:
            raise ParameterError("k must be >= 1")
        if cfg.r < 0:
            raise ParameterError("r must be >= 0")
    if cfg.command == "verify-direct" and cfg.r >= 1 and cfg.p < 1.0:
        raise ParameterError(
            "verify-direct with r >= 1 requires 1 <= p <= inf "
            "(the higher-order direct estimate fails for 0 < p < 1)")
    if cfg.command in ("modulus", "verify-direct", "verify-whitney",
                       "verify-inverse", "verify-appendix"):
        if cfg.r / 2.0 + cfg.alpha < 0 or cfg.r / 2.0 + cfg.beta < 0:
            raise ParameterError(
                "moduli of order r require r/2+alpha >= 0 and r/2+beta >= 0")
    if cfg.command == "verify-inverse" and cfg.p < 1.0:
        raise ParameterError("verify-inverse requires 1 <= p <= inf; "
                             "use verify-inverse-smallp for 0 < p < 1")
    if cfg.command == "verify-inverse-smallp":
        if not 0.0 < cfg.p < 1.0:
            raise ParameterError("verify-inverse-smallp requires 0 < p < 1")
        if cfg.alpha < 0 or cfg.beta < 0:
            raise ParameterError("verify-inverse-smallp requires alpha, beta >= 0")
        if not 0.0 < cfg.c_hat <= 1.0:
            raise ParameterError("c_hat must lie in (0, 1]")
    if cfg.command == "verify-appendix" and not 1.0 < cfg.p < math.inf:
        raise ParameterError("verify-appendix requires 1 < p < inf")
    if cfg.command in ("error-seq", "verify-direct", "fit-decay",
                       "verify-inverse-smallp"):
        if not 1 <= cfg.n_min <= cfg.n_max <= harness.N_RANGE_MAX:
            raise ParameterError(
                f"n range must satisfy 1 <= n_min <= n_max <= {harness.N_RANGE_MAX}")
    return params


# ---------------------------------------------------------------------------
# error-sequence cache


def cache_dir(cfg: RunConfig):
    return cfg.cache or os.environ.get(CACHE_ENV)


def sequence_cache_key(spec_name, params, interval, settings=None) -> str:
    payload = json.dumps({
        "spec": spec_name,
        "alpha": params.alpha,
        "beta": params.beta,
        "p": repr(params.p),
        "interval": [repr(interval[0]), repr(interval[1])],
        "settings": {k: repr(v) for k, v in sorted((settings or SOLVER_SETTINGS).items())},
    }, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def save_sequence(seq: harness.ErrorSequence, directory: str) -> str:
    os.makedirs(directory, exist_ok=True)
    key = sequence_cache_key(seq.spec_name, seq.params, seq.interval)
    path = os.path.join(directory, f"{key}.json")
    doc = {
        "key": key,
        "spec": seq.spec_name,
        "alpha": seq.params.alpha,
        "beta": seq.params.beta,
        "p": "inf" if math.isinf(seq.params.p) else seq.params.p,
        "interval": list(seq.interval),
        "settings": SOLVER_SETTINGS,
        "entries": [[e.n, e.error, e.certificate] for e in seq.entries],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)  # json floats round-trip exactly (repr-based)
    return path


def load_sequence(spec_name, params, interval, directory):
    """Cached sequence or None; key mismatch or corruption is a miss."""
    key = sequence_cache_key(spec_name, params, interval)
    path = os.path.join(directory, f"{key}.json")
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            doc = json.load(fh)
        stored_p = math.inf if doc["p"] == "inf" else float(doc["p"])
        rekey = sequence_cache_key(
            doc["spec"], WeightParams(doc["alpha"], doc["beta"], stored_p),
            tuple(doc["interval"]),
            settings=doc.get("settings", {}))
        if rekey != key:
            print(f"warning: cache key mismatch for {path}; recomputing",
                  file=sys.stderr)
            return None
        entries = tuple(harness.SequenceEntry(n=int(n), error=float(err),
                                              certificate=str(cert))
                        for n, err, cert in doc["entries"])
        return harness.ErrorSequence(spec_name=doc["spec"], params=params,
                                     entries=entries, interval=tuple(doc["interval"]))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"warning: unreadable cache file {path} ({exc}); recomputing",
              file=sys.stderr)
        return None


def _preload_cache(cfg: RunConfig):
    directory = cache_dir(cfg)
    if not directory:
        return
    try:
        params = cfg.params()
    except ParameterError:
        return
    for name in cfg.fns:
        seq = load_sequence(name, params, harness.FULL, directory)
        if seq is None:
            continue
        spec = corpus_by_name(name)
        store = harness._seq_store(spec, params, harness.FULL)
        for e in seq.entries:
            store.setdefault(e.n, (e.error, e.certificate, None))


def _persist_cache(cfg: RunConfig, seqs):
    directory = cache_dir(cfg)
    if not directory:
        return
    for seq in seqs:
        save_sequence(seq, directory)


# ---------------------------------------------------------------------------
# command execution


def _single_case_report(name, label, value, extra=""):
    case = harness.Case(label=label, lhs=value, rhs=math.nan, ratio=math.nan,
                        note=extra)
    return harness.InequalityReport(name=name, cases=[case],
                                    fitted_constant=value, passed=True,
                                    notes=[extra] if extra else [])


def run(cfg: RunConfig) -> int:
    """Execute the command; write CSV and summary; print a one-line digest."""
    params = cfg.params()
    _preload_cache(cfg)
    reports = []
    nonconverged = False
    seqs_to_persist = []

    if cfg.command == "modulus":
        spec = cfg.specs()[0]
        q = moduli.ModulusQuery(spec=spec, k=cfg.k, r=cfg.r, t=cfg.t, params=params)
        res = moduli.averaged_modulus(q) if cfg.averaged else moduli.weighted_modulus(q)
        nonconverged = not res.converged
        kind = "averaged modulus" if cfg.averaged else "modulus"
        reports.append(_single_case_report(
            "modulus", harness._label(spec, params, cfg.k, cfg.r, cfg.t),
            res.value, extra=f"{kind}; argmax_h={res.argmax_h!r}"))
        digest = f"{kind} = {res.value!r} (argmax_h {res.argmax_h!r})"

    elif cfg.command == "best-approx":
        spec = cfg.specs()[0]
        if cfg.x0 is not None or cfg.h is not None:
            if cfg.x0 is None or cfg.h is None:
                raise ParameterError("local best-approx needs both --x0 and --h")
            res = bestapprox.local_best_approx(spec, cfg.n, cfg.x0, cfg.h, params)
        else:
            res = bestapprox.best_approx(spec, cfg.n, harness.FULL, params)
        nonconverged = not res.converged
        reports.append(_single_case_report(
            "best-approx", harness._label(spec, params, cfg.n, 0, cfg.n),
            res.error, extra=f"certificate={res.certificate}"))
        digest = f"E_{cfg.n}({spec.name}) = {res.error!r} [{res.certificate}]"

    elif cfg.command == "error-seq":
        spec = cfg.specs()[0]
        seq = harness.compute_error_sequence(spec, params, (cfg.n_min, cfg.n_max))
        seqs_to_persist.append(seq)
        cases = [harness.Case(label=harness._label(spec, params, 0, 0, e.n),
                              lhs=e.error, rhs=math.nan, ratio=math.nan,
                              note=e.certificate)
                 for e in seq.entries]
        nonconverged = any(not math.isfinite(e.error) for e in seq.entries)
        reports.append(harness.InequalityReport(
            name="error-seq", cases=cases,
            fitted_constant=seq.entries[-1].error, passed=not nonconverged))
        digest = (f"E_n({spec.name}) for n={cfg.n_min}..{cfg.n_max}: "
                  f"E_{cfg.n_max} = {seq.entries[-1].error!r}")

    elif cfg.command == "verify-direct":
        rep = harness.verify_direct(cfg.specs(), [params], cfg.k, cfg.r,
                                    (max(cfg.n_min, cfg.k + cfg.r), cfg.n_max))
        reports.append(rep)
        digest = _report_digest(rep)

    elif cfg.command == "verify-inverse":
        for spec in cfg.specs():
            rep = harness.verify_inverse(spec, params, cfg.k, cfg.r, cfg.big_n,
                                         cfg.t_grid, cfg.n_max)
            reports.append(rep)
        digest = "; ".join(_report_digest(r) for r in reports)

    elif cfg.command == "verify-inverse-smallp":
        for spec in cfg.specs():
            rep = harness.verify_inverse_smallp(spec, params, cfg.k,
                                                (cfg.n_min, cfg.n_max), cfg.c_hat)
            reports.append(rep)
        digest = "; ".join(_report_digest(r) for r in reports)

    elif cfg.command == "verify-whitney":
        rep = harness.verify_whitney(cfg.specs(), [params], cfg.k, cfg.r,
                                     theta=cfg.theta, samples=cfg.samples,
                                     seed=cfg.seed)
        reports.append(rep)
        digest = _report_digest(rep)

    elif cfg.command == "verify-appendix":
        for spec in cfg.specs():
            rep = harness.verify_appendix(spec, params, cfg.m, cfg.r,
                                          cfg.t_grid, cfg.n_max)
            reports.append(rep)
        digest = "; ".join(_report_digest(r) for r in reports)

    elif cfg.command == "fit-decay":
        spec = cfg.specs()[0]
        seq = harness.compute_error_sequence(spec, params, (1, cfg.n_max))
        seqs_to_persist.append(seq)
        prof = harness.fit_decay(seq, cfg.n_min, k=cfg.k, r=cfg.r)
        reports.append(_single_case_report(
            "fit-decay", harness._label(spec, params, cfg.k, cfg.r, cfg.n_max),
            prof.gamma,
            extra=f"C_fit={prof.cross_check_constant!r} "
                  f"stable={prof.cross_check_stable}"))
        digest = f"gamma({spec.name}) = {prof.gamma!r}"

    elif cfg.command == "report":
        reports.extend(_default_battery(cfg, params))
        digest = "; ".join(_report_digest(r) for r in reports)

    _persist_cache(cfg, seqs_to_persist)
    csv_path = cfg.out + ".csv"
    summary_path = cfg.out + ".summary.txt"
    harness.write_csv(csv_path, reports)
    harness.write_summary(summary_path, reports)
    print(digest)
    if any(not rep.passed for rep in reports):
        return EXIT_FAIL
    if nonconverged:
        return EXIT_NONCONVERGED
    return EXIT_PASS


def _report_digest(rep):
    return (f"{rep.name}: {'pass' if rep.passed else 'FAIL'} "
            f"fitted_constant={rep.fitted_constant!r} cases={len(rep.cases)}")


def _default_battery(cfg, params):
    """A quick default verification run over a small corpus slice."""
    specs = cfg.specs()
    out = [harness.verify_direct(specs, [params], cfg.k, cfg.r,
                                 (cfg.k + cfg.r, min(cfg.n_max, 16)))]
    if params.p >= 1.0:
        for spec in specs:
            out.append(harness.verify_inverse(
                spec, params, cfg.k, cfg.r, cfg.big_n,
                [t for t in cfg.t_grid if t >= 1.0 / min(cfg.n_max, 32)],
                min(cfg.n_max, 32)))
    out.append(harness.verify_whitney(specs, [params], cfg.k, cfg.r,
                                      theta=cfg.theta,
                                      samples=min(cfg.samples, 16),
                                      seed=cfg.seed))
    return out


def main(argv=None) -> int:
    try:
        cfg = load_config(argv)
    except (ParameterError, KeyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg)
    except (ParameterError, PreconditionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, SolverStallError) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except JacobiApproxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
