"""Command-line front end.

Verbs fall into three groups: samplers that write data files (sample-path,
sample-tree, population, feller), converters between the path CSV and
forest JSON formats (to-tree, to-path), and verification experiments that
write JSON + CSV reports (verify-*).

Configuration is file-first: --config names a JSON object whose keys are
the long option names, and explicit flags override it.  Exit codes: 0 ok,
1 usage error, 2 validation or resource error, 3 report failed under
--assert.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from gwexplore import diagnostics
from gwexplore.bijection import forest_to_path, path_to_forest
from gwexplore.errors import GwExploreError, ValidationError
from gwexplore.paths import read_path, write_path
from gwexplore.samplers import (RateParams, RenormParams, sample_feller,
                                sample_forest, sample_path,
                                sample_population)
from gwexplore.trees import read_forest, write_forest

__all__ = ["ExperimentConfig", "run", "main"]


@dataclass
class ExperimentConfig:
    """One fully resolved invocation: verb plus every parameter it needs.

    Round-trips losslessly through its JSON form (to_dict/from_dict);
    infinite ceilings are spelled "inf" there.
    """

    verb: str
    lam: float | None = None
    mu: float | None = None
    sigma: float | None = None
    alpha: float | None = None
    beta: float | None = None
    ceiling: float | None = None
    ancestors: int | None = None
    x: float | None = None
    big_n: int | None = None
    horizon: float | None = None
    dt: float | None = None
    levels: list | None = None
    excise_at: float | None = None
    slope: float | None = None
    replicas: int | None = None
    seed: int = 0
    workers: int | None = None
    infile: str | None = None
    out: str | None = None
    assert_pass: bool = False

    def to_dict(self):
        """JSON-object form keyed by the long option names."""
        out = {"verb": self.verb}
        for key, attr in _KEYMAP.items():
            value = getattr(self, attr)
            if value is None or (attr == "assert_pass" and value is False):
                continue
            if isinstance(value, float) and math.isinf(value):
                value = "inf"
            out[key] = value
        return out

    @classmethod
    def from_dict(cls, data, verb=None):
        if not isinstance(data, dict):
            raise ValidationError("config must be a JSON object")
        kwargs = {}
        got_verb = data.get("verb", verb)
        if got_verb is None:
            raise ValidationError("config needs a verb")
        if verb is not None and got_verb != verb:
            raise ValidationError(
                "config verb %r does not match %r" % (got_verb, verb))
        if got_verb not in _VERB_FIELDS:
            raise ValidationError("unknown verb %r" % got_verb)
        allowed = _VERB_FIELDS[got_verb]
        for key, value in data.items():
            if key == "verb":
                continue
            attr = _KEYMAP.get(key)
            if attr is None:
                raise ValidationError("unknown config key %r" % key)
            if attr not in allowed:
                raise ValidationError(
                    "config key %r does not apply to verb %s"
                    % (key, got_verb))
            kwargs[attr] = _coerce(attr, key, value)
        return cls(verb=got_verb, **kwargs)


# long option name -> dataclass attribute
_KEYMAP = {
    "lambda": "lam",
    "mu": "mu",
    "sigma": "sigma",
    "alpha": "alpha",
    "beta": "beta",
    "ceiling": "ceiling",
    "ancestors": "ancestors",
    "x": "x",
    "big-n": "big_n",
    "horizon": "horizon",
    "dt": "dt",
    "levels": "levels",
    "excise-at": "excise_at",
    "slope": "slope",
    "replicas": "replicas",
    "seed": "seed",
    "workers": "workers",
    "in": "infile",
    "out": "out",
    "assert": "assert_pass",
}

_FLOAT_FIELDS = {"lam", "mu", "sigma", "alpha", "beta", "ceiling", "x",
                 "horizon", "dt", "excise_at", "slope"}
_INT_FIELDS = {"ancestors", "big_n", "replicas", "seed", "workers"}

_RATE = ("lam", "mu", "ceiling", "ancestors")
_RENORM = ("sigma", "alpha", "beta", "big_n", "x", "ceiling")
_VERIFY = ("replicas", "seed", "workers", "out", "assert_pass")

_VERB_FIELDS = {
    "sample-path": _RATE + ("slope", "seed", "out"),
    "sample-tree": _RATE + ("seed", "out"),
    "population": ("sigma", "alpha", "beta", "big_n", "x", "horizon",
                   "seed", "out"),
    "feller": ("sigma", "alpha", "beta", "x", "horizon", "dt", "seed",
               "out"),
    "to-tree": ("infile", "out"),
    "to-path": ("infile", "slope", "out"),
    "verify-rk-discrete": _RATE + _VERIFY,
    "verify-law": _RATE + _VERIFY,
    "verify-chop": _RATE + ("excise_at",) + _VERIFY,
    "verify-martingale": _RENORM + ("horizon",) + _VERIFY,
    "verify-rk-limit": _RENORM + ("levels", "dt") + _VERIFY,
}

_DEFAULTS = {
    "sample-path": dict(lam=1.0, mu=1.0, ceiling=math.inf, ancestors=1,
                        slope=2.0, out="path.csv"),
    "sample-tree": dict(lam=1.0, mu=1.0, ceiling=math.inf, ancestors=1,
                        out="forest.json"),
    "population": dict(sigma=2.0, alpha=0.0, beta=0.0, big_n=100, x=1.0,
                       horizon=1.0, out="population.csv"),
    "feller": dict(sigma=2.0, alpha=0.0, beta=0.0, x=1.0, horizon=1.0,
                   dt=1e-3, out="feller.csv"),
    "to-tree": dict(out="forest.json"),
    "to-path": dict(slope=2.0, out="path.csv"),
    "verify-rk-discrete": dict(lam=1.0, mu=1.0, ceiling=4.0,
                               ancestors=1, replicas=1000,
                               out="report.json"),
    "verify-law": dict(lam=1.0, mu=1.0, ceiling=4.0, ancestors=1,
                       replicas=10000, out="report.json"),
    "verify-chop": dict(lam=0.8, mu=1.0, ceiling=3.0, ancestors=1,
                        excise_at=1.5, replicas=10000, out="report.json"),
    "verify-martingale": dict(sigma=2.0, alpha=0.0, beta=0.0, big_n=200,
                              x=1.0, ceiling=4.0, horizon=1.0,
                              replicas=2000, out="report.json"),
    "verify-rk-limit": dict(sigma=2.0, alpha=0.0, beta=0.0, big_n=200,
                            x=1.0, ceiling=4.0, levels=[0.25, 0.5, 1.0],
                            dt=1e-3, replicas=10000, out="report.json"),
}


def _coerce(attr, key, value):
    """Check and convert one config-file value."""
    if attr in _FLOAT_FIELDS:
        if value == "inf":
            return math.inf
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError("config key %r must be a number" % key)
        return float(value)
    if attr in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError("config key %r must be an integer" % key)
        return value
    if attr == "levels":
        if not isinstance(value, list) or not value or any(
                isinstance(v, bool) or not isinstance(v, (int, float))
                for v in value):
            raise ValidationError(
                "config key 'levels' must be a nonempty list of numbers")
        return [float(v) for v in value]
    if attr == "assert_pass":
        if not isinstance(value, bool):
            raise ValidationError("config key 'assert' must be a boolean")
        return value
    if attr in ("infile", "out"):
        if not isinstance(value, str) or not value:
            raise ValidationError("config key %r must be a string" % key)
        return value
    raise ValidationError("unknown config key %r" % key)


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _levels_arg(text):
    try:
        vals = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            "levels must be comma-separated numbers")
    if not vals:
        raise argparse.ArgumentTypeError("levels must be nonempty")
    return vals


def _add_common(p):
    p.add_argument("--seed", type=int, default=None,
                   help="base seed for the random streams (default: 0)")
    p.add_argument("--out", default=None, metavar="FILE",
                   help="output file (a sidecar/CSV twin is written next"
                        " to it)")
    p.add_argument("--config", default=None, metavar="FILE",
                   help="JSON config file; explicit flags override it")


def _add_rate(p, d):
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   metavar="RATE",
                   help="death rate per individual (default: %g)" % d["lam"])
    p.add_argument("--mu", type=float, default=None, metavar="RATE",
                   help="birth rate per individual (default: %g)" % d["mu"])
    p.add_argument("--ceiling", type=float, default=None, metavar="A",
                   help="kill every individual alive at this age of the"
                        " population, 'inf' for none (default: %g)"
                        % d["ceiling"])
    p.add_argument("--ancestors", type=int, default=None, metavar="M",
                   help="number of independent ancestors (default: %d)"
                        % d["ancestors"])


def _add_renorm(p, d):
    p.add_argument("--sigma", type=float, default=None,
                   help="diffusion coefficient (default: %g)" % d["sigma"])
    p.add_argument("--alpha", type=float, default=None,
                   help="birth-rate excess over sigma^2 N / 2 (default: %g)"
                        % d["alpha"])
    p.add_argument("--beta", type=float, default=None,
                   help="death-rate excess over sigma^2 N / 2 (default: %g)"
                        % d["beta"])
    p.add_argument("--big-n", dest="big_n", type=int, default=None,
                   metavar="N",
                   help="renormalization index; floor(N x) ancestors, mass"
                        " 1/N each (default: %d)" % d["big_n"])
    p.add_argument("--x", type=float, default=None,
                   help="initial rescaled population mass (default: %g)"
                        % d["x"])


def _add_verify(p, defaults):
    p.add_argument("--replicas", type=int, default=None,
                   help="number of Monte Carlo replicas (default: %d)"
                        % defaults["replicas"])
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: all cores); results do"
                        " not depend on it")
    p.add_argument("--assert", dest="assert_pass", action="store_true",
                   help="exit with code 3 if the report fails")


def build_parser():
    parser = _Parser(
        prog="gwexplore",
        description="Sample binary branching forests and their exploration"
                    " paths, convert between the two encodings, and verify"
                    " the exact and limiting local-time identities that"
                    " couple them.")
    sub = parser.add_subparsers(dest="verb", metavar="VERB", required=True)

    p = sub.add_parser(
        "sample-path",
        help="sample an exploration path and write it as CSV",
        description="Sample a piecewise-linear exploration path: ascents"
                    " Exp(lambda), descents Exp(mu), reflected at the"
                    " ceiling, stopped at the ancestors-th return to zero."
                    " Writes CSV breakpoints plus a JSON sidecar.")
    _add_rate(p, _DEFAULTS["sample-path"])
    p.add_argument("--slope", type=float, default=None,
                   help="absolute slope of the path (default: 2)")
    _add_common(p)

    p = sub.add_parser(
        "sample-tree",
        help="sample a branching forest and write it as JSON",
        description="Sample a forest directly: per individual, Exp(lambda)"
                    " lifetime truncated at the ceiling and rate-mu birth"
                    " times. Writes the forest JSON format.")
    _add_rate(p, _DEFAULTS["sample-tree"])
    _add_common(p)

    p = sub.add_parser(
        "population",
        help="simulate the rescaled population count process",
        description="Gillespie simulation of the N-renormalized"
                    " birth-death count process from floor(N x)"
                    " individuals, written as a time,count CSV.")
    _add_renorm(p, _DEFAULTS["population"])
    p.add_argument("--horizon", type=float, default=None,
                   help="simulate on [0, horizon] (default: 1)")
    _add_common(p)

    p = sub.add_parser(
        "feller",
        help="simulate the square-root diffusion",
        description="Full-truncation Euler scheme for the square-root"
                    " diffusion dX = (alpha-beta) X dt + sigma sqrt(X) dB,"
                    " written as a time,value CSV.")
    d = _DEFAULTS["feller"]
    p.add_argument("--sigma", type=float, default=None,
                   help="diffusion coefficient (default: %g)" % d["sigma"])
    p.add_argument("--alpha", type=float, default=None,
                   help="positive drift rate (default: %g)" % d["alpha"])
    p.add_argument("--beta", type=float, default=None,
                   help="negative drift rate (default: %g)" % d["beta"])
    p.add_argument("--x", type=float, default=None,
                   help="initial value (default: %g)" % d["x"])
    p.add_argument("--horizon", type=float, default=None,
                   help="simulate on [0, horizon] (default: 1)")
    p.add_argument("--dt", type=float, default=None,
                   help="Euler step (default: 1e-3)")
    _add_common(p)

    p = sub.add_parser(
        "to-tree",
        help="convert a path CSV into the forest it encodes",
        description="Decode the exploration path into its forest: each"
                    " excursion maximum is a death time, each interior"
                    " minimum a birth. Exact, no sampling involved.")
    p.add_argument("--in", dest="infile", default=None, metavar="FILE",
                   help="path CSV (with its JSON sidecar next to it)")
    _add_common(p)

    p = sub.add_parser(
        "to-path",
        help="convert a forest JSON into its exploration path",
        description="Encode a forest as its exploration path by the"
                    " depth-first contour; inverse of to-tree.")
    p.add_argument("--in", dest="infile", default=None, metavar="FILE",
                   help="forest JSON file")
    p.add_argument("--slope", type=float, default=None,
                   help="absolute slope of the output path (default: 2)")
    _add_common(p)

    p = sub.add_parser(
        "verify-rk-discrete",
        help="exact coupling of local times and alive counts",
        description="Check, pathwise and exactly, that the local time of a"
                    " sampled path at every midpoint level equals the"
                    " number of individuals of its decoded forest alive at"
                    " that level, and that the ceiling local time equals"
                    " the killed count. Any single violation fails.")
    _add_rate(p, _DEFAULTS["verify-rk-discrete"])
    _add_verify(p, _DEFAULTS["verify-rk-discrete"])
    _add_common(p)

    p = sub.add_parser(
        "verify-law",
        help="law equality of the two samplers",
        description="KS-compare forests decoded from sampled paths against"
                    " directly sampled forests on total individuals,"
                    " extinction time, and the alive count at t=0.5.")
    _add_rate(p, _DEFAULTS["verify-law"])
    _add_verify(p, _DEFAULTS["verify-law"])
    _add_common(p)

    p = sub.add_parser(
        "verify-chop",
        help="excision above a level matches direct reflection",
        description="KS-compare paths sampled under a wide ceiling and"
                    " then excised above --excise-at against paths sampled"
                    " directly with that ceiling.")
    _add_rate(p, _DEFAULTS["verify-chop"])
    p.add_argument("--excise-at", dest="excise_at", type=float,
                   default=None, metavar="A",
                   help="excision level (default: 1.5)")
    _add_verify(p, _DEFAULTS["verify-chop"])
    _add_common(p)

    p = sub.add_parser(
        "verify-martingale",
        help="martingale reconstruction from renormalized paths",
        description="Reconstruct the compensated height martingale from"
                    " sampled renormalized paths: mean zero at the"
                    " evaluation times, bracket slope 4/sigma^2, and jump"
                    " magnitudes exactly 2/(N sigma^2).")
    _add_renorm(p, _DEFAULTS["verify-martingale"])
    p.add_argument("--ceiling", type=float, default=None, metavar="A",
                   help="reflection level (default: 4)")
    p.add_argument("--horizon", type=float, default=None,
                   help="minimum path duration (default: 1)")
    _add_verify(p, _DEFAULTS["verify-martingale"])
    _add_common(p)

    p = sub.add_parser(
        "verify-rk-limit",
        help="local times against the diffusion and the population",
        description="Compare level local times of renormalized paths,"
                    " stopped at the floor(N x)-th return to zero, against"
                    " exact birth-death moments, the scaled square-root"
                    " diffusion (KS), and the same-N population count"
                    " (KS, an identity in law at every N).")
    _add_renorm(p, _DEFAULTS["verify-rk-limit"])
    p.add_argument("--ceiling", type=float, default=None, metavar="A",
                   help="reflection level (default: 4)")
    p.add_argument("--levels", type=_levels_arg, default=None,
                   help="comma-separated levels to check"
                        " (default: 0.25,0.5,1.0)")
    p.add_argument("--dt", type=float, default=None,
                   help="Euler step for the diffusion sample"
                        " (default: 1e-3)")
    _add_verify(p, _DEFAULTS["verify-rk-limit"])
    _add_common(p)

    return parser


def _resolve(ns):
    """Merge defaults, config file, and explicit flags into a config."""
    merged = dict(_DEFAULTS[ns.verb])
    merged.setdefault("seed", 0)
    config_file = getattr(ns, "config", None)
    if config_file:
        try:
            raw = json.loads(Path(config_file).read_text())
        except FileNotFoundError:
            raise ValidationError("config file not found: %s" % config_file)
        except json.JSONDecodeError as exc:
            raise ValidationError(
                "config file %s is not valid JSON: %s" % (config_file, exc))
        file_cfg = ExperimentConfig.from_dict(raw, verb=ns.verb)
        for f in fields(ExperimentConfig):
            if f.name == "verb":
                continue
            value = getattr(file_cfg, f.name)
            if f.name == "assert_pass":
                if value:
                    merged[f.name] = True
            elif value is not None:
                merged[f.name] = value
    for name, value in vars(ns).items():
        if name in ("verb", "config"):
            continue
        if name == "assert_pass":
            if value:
                merged[name] = True
        elif value is not None:
            merged[name] = value
    return ExperimentConfig(verb=ns.verb, **merged)


# ---------------------------------------------------------------------------
# verb handlers

def _workers(cfg):
    if cfg.workers is not None:
        if cfg.workers < 1:
            raise ValidationError("workers must be at least 1")
        return cfg.workers
    return os.cpu_count() or 1


def _echo_rate(cfg):
    return {"lambda": cfg.lam, "mu": cfg.mu,
            "ceiling": None if math.isinf(cfg.ceiling) else cfg.ceiling,
            "ancestors": cfg.ancestors}


def _fmt17(x):
    return "%.17g" % x


def _write_sidecar(out, payload):
    Path(out).with_suffix(".json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _run_sample_path(cfg):
    params = RateParams(cfg.lam, cfg.mu, cfg.ceiling, cfg.ancestors)
    path = sample_path(params, slope_p=cfg.slope, seed=cfg.seed)
    write_path(path, cfg.out, seed=cfg.seed, params=_echo_rate(cfg))
    print("wrote %s: %d extrema, duration %.6g"
          % (cfg.out, path.n_extrema, path.duration))
    return 0


def _run_sample_tree(cfg):
    params = RateParams(cfg.lam, cfg.mu, cfg.ceiling, cfg.ancestors)
    forest = sample_forest(params, seed=cfg.seed)
    write_forest(forest, cfg.out)
    print("wrote %s: %d individuals in %d trees"
          % (cfg.out, len(forest.nodes), forest.m))
    return 0


def _run_population(cfg):
    renorm = RenormParams(cfg.sigma, cfg.alpha, cfg.beta, cfg.big_n, cfg.x)
    traj = sample_population(renorm, cfg.horizon, seed=cfg.seed)
    lines = ["time,count", "0,%d" % traj.initial_count]
    for t, n in zip(traj.jump_times, traj.counts):
        lines.append("%s,%d" % (_fmt17(t), n))
    Path(cfg.out).write_text("\n".join(lines) + "\n")
    _write_sidecar(cfg.out, {
        "sigma": cfg.sigma, "alpha": cfg.alpha, "beta": cfg.beta,
        "big-n": cfg.big_n, "x": cfg.x, "horizon": cfg.horizon,
        "seed": cfg.seed})
    print("wrote %s: %d events, final count %d"
          % (cfg.out, traj.jump_times.shape[0],
             traj.counts[-1] if traj.counts.shape[0] else
             traj.initial_count))
    return 0


def _run_feller(cfg):
    fp = sample_feller(cfg.x, cfg.alpha, cfg.beta, cfg.sigma, cfg.horizon,
                       cfg.dt, seed=cfg.seed)
    lines = ["time,value"]
    for t, v in zip(fp.times, fp.values):
        lines.append("%s,%s" % (_fmt17(t), _fmt17(v)))
    Path(cfg.out).write_text("\n".join(lines) + "\n")
    _write_sidecar(cfg.out, {
        "sigma": cfg.sigma, "alpha": cfg.alpha, "beta": cfg.beta,
        "x": cfg.x, "horizon": cfg.horizon, "dt": cfg.dt,
        "seed": cfg.seed})
    print("wrote %s: %d steps, final value %.6g"
          % (cfg.out, fp.values.shape[0] - 1, fp.values[-1]))
    return 0


def _run_to_tree(cfg):
    if not cfg.infile:
        raise ValidationError("to-tree needs an input file (--in)")
    path, _ = read_path(cfg.infile)
    forest = path_to_forest(path)
    write_forest(forest, cfg.out)
    print("wrote %s: %d individuals in %d trees"
          % (cfg.out, len(forest.nodes), forest.m))
    return 0


def _run_to_path(cfg):
    if not cfg.infile:
        raise ValidationError("to-path needs an input file (--in)")
    forest = read_forest(cfg.infile)
    path = forest_to_path(forest, slope_p=cfg.slope)
    write_path(path, cfg.out)
    print("wrote %s: %d extrema, duration %.6g"
          % (cfg.out, path.n_extrema, path.duration))
    return 0


def _emit_report(report, cfg):
    out = Path(cfg.out)
    report.write_json(out)
    report.write_csv(out.with_suffix(".csv"))
    checked = sum(1 for r in report.rows if r.passed is not None)
    print("%s %s: %d/%d checks passed, report in %s"
          % ("PASS" if report.passed else "FAIL", report.name,
             sum(1 for r in report.rows if r.passed), checked, out))
    if cfg.assert_pass and not report.passed:
        return 3
    return 0


def _run_verify_rk_discrete(cfg):
    params = RateParams(cfg.lam, cfg.mu, cfg.ceiling, cfg.ancestors)
    report = diagnostics.verify_discrete_rk(
        params, replicas=cfg.replicas, seed=cfg.seed, workers=_workers(cfg))
    return _emit_report(report, cfg)


def _run_verify_law(cfg):
    params = RateParams(cfg.lam, cfg.mu, cfg.ceiling, cfg.ancestors)
    report = diagnostics.verify_law_equality(
        params, replicas=cfg.replicas, seed=cfg.seed, workers=_workers(cfg))
    return _emit_report(report, cfg)


def _run_verify_chop(cfg):
    params = RateParams(cfg.lam, cfg.mu, cfg.ceiling, cfg.ancestors)
    report = diagnostics.verify_excision(
        params, cfg.excise_at, replicas=cfg.replicas, seed=cfg.seed,
        workers=_workers(cfg))
    return _emit_report(report, cfg)


def _run_verify_martingale(cfg):
    renorm = RenormParams(cfg.sigma, cfg.alpha, cfg.beta, cfg.big_n, cfg.x,
                          ceiling_a=cfg.ceiling)
    report = diagnostics.martingale_diagnostic(
        renorm, horizon=cfg.horizon, replicas=cfg.replicas, seed=cfg.seed,
        workers=_workers(cfg))
    return _emit_report(report, cfg)


def _run_verify_rk_limit(cfg):
    renorm = RenormParams(cfg.sigma, cfg.alpha, cfg.beta, cfg.big_n, cfg.x,
                          ceiling_a=cfg.ceiling)
    report = diagnostics.verify_rk_limit(
        renorm, levels=cfg.levels, replicas=cfg.replicas, dt=cfg.dt,
        seed=cfg.seed, workers=_workers(cfg))
    return _emit_report(report, cfg)


_HANDLERS = {
    "sample-path": _run_sample_path,
    "sample-tree": _run_sample_tree,
    "population": _run_population,
    "feller": _run_feller,
    "to-tree": _run_to_tree,
    "to-path": _run_to_path,
    "verify-rk-discrete": _run_verify_rk_discrete,
    "verify-law": _run_verify_law,
    "verify-chop": _run_verify_chop,
    "verify-martingale": _run_verify_martingale,
    "verify-rk-limit": _run_verify_rk_limit,
}


def run(config):
    """Execute one resolved config; returns the exit code."""
    return _HANDLERS[config.verb](config)


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _resolve(ns)
        return run(config)
    except GwExploreError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
