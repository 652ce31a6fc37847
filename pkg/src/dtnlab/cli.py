"""Configuration-driven experiment runner and command line entry point.

A YAML config describes one experiment: a domain, a potential, a backend,
one or more boundary resolutions, a time/angle grid, and a list of checks
with optional per-check parameters.  ``run_experiment`` builds (or loads
from cache) the operators, runs every requested check, and writes one
JSON report per check plus plot-ready CSV files; the process exits 0 iff
every verdict is a pass.

Artifact names are stable: ``report-<label>.json``, ``summary.json``,
``curve-<label>.csv``, ``sweep-n<res>.csv``, ``spectrum-n<res>.csv`` and
``kernel-n<res>-t<t>.csv``, where ``<label>`` is the check name plus
``-n<res>`` for per-resolution checks.
"""

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from .cache import fetch_operator
from .geometry import make_domain, sample_witnesses
from .operator import make_potential
from .semigroup import kernel_matrix
from .verify import (BoundSpec, SweepGrid, commutator_growth_check,
                     convolution_check, derivative_bound_check,
                     domination_check, lplq_slope, poisson_sup_ratio,
                     sector_holomorphy_sweep, submarkov_check)

SCHEMA_VERSION = 1

# checks that consume the whole resolution family at once; the rest run
# once per resolution
FAMILY_CHECKS = ("poisson", "derivative", "sector")

CHECK_PARAMS = {
    "poisson": {"distance", "cos_power"},
    "domination": {"versus", "tol"},
    "submarkov": {"tol_equality", "tol_upper", "tol_positive"},
    "slope": {"p", "q", "slope_slack"},
    "commutator": {"iterations", "n_witnesses", "cos_power"},
    "derivative": {"k", "l", "cos_power"},
    "convolution": {"variation_limit", "max_pairs"},
    "sector": set(),
}

_TOLERANCE_KEYS = {"tol", "tol_equality", "tol_upper", "tol_positive",
                   "slope_slack", "variation_limit"}


class ConfigError(ValueError):
    """Invalid or unparsable experiment configuration."""


class ExperimentConfig:
    """Validated experiment description; build with :func:`load_config`."""

    def __init__(self, domain, potential, backend, resolutions, times,
                 angles, checks, out_dir, cache_dir, seed):
        self.domain = domain
        self.potential = potential
        self.backend = backend
        self.resolutions = resolutions
        self.times = times
        self.angles = angles
        self.checks = checks
        self.out_dir = out_dir
        self.cache_dir = cache_dir
        self.seed = seed

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a mapping")
        known = {"schema", "domain", "potential", "backend", "resolutions",
                 "times", "angles", "checks", "out", "cache", "seed"}
        for key in raw:
            if key not in known:
                raise ConfigError(f"unknown config field {key!r}")
        schema = raw.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise ConfigError(
                f"schema: unsupported version {schema!r} "
                f"(this build reads {SCHEMA_VERSION})")

        try:
            domain = make_domain(raw.get("domain", "unit-disk"))
        except (ValueError, KeyError, TypeError) as e:
            raise ConfigError(f"domain: {e}") from None
        try:
            potential = make_potential(raw.get("potential"))
        except (ValueError, TypeError) as e:
            raise ConfigError(f"potential: {e}") from None

        backend = raw.get("backend", "exact")
        if backend not in ("exact", "fem"):
            raise ConfigError(
                f"backend: expected 'exact' or 'fem', got {backend!r}")
        if backend == "exact":
            if domain.kind not in ("unit-disk", "annulus"):
                raise ConfigError(
                    f"backend: exact supports disk and annulus domains, "
                    f"not {domain.kind!r}")
            if potential.constant_value() is None:
                raise ConfigError(
                    "backend: exact requires a constant potential")

        resolutions = raw.get("resolutions", [128])
        if (not isinstance(resolutions, list) or not resolutions
                or not all(isinstance(r, int) and r > 0 for r in resolutions)):
            raise ConfigError(
                "resolutions: need a nonempty list of positive integers")
        resolutions = sorted(resolutions)

        times = raw.get("times")
        if (not isinstance(times, list) or not times
                or not all(isinstance(t, (int, float)) and t > 0
                           for t in times)):
            raise ConfigError("times: need a nonempty list of positive numbers")
        times = [float(t) for t in sorted(times)]

        angles = raw.get("angles", [0.0])
        if (not isinstance(angles, list) or not angles
                or not all(isinstance(a, (int, float)) for a in angles)):
            raise ConfigError("angles: need a list of numbers")
        angles = [float(a) for a in angles]
        for a in angles:
            if abs(a) >= np.pi / 2:
                raise ConfigError(
                    f"angles: {a:.4f} is outside the open sector "
                    f"(|angle| < pi/2)")

        raw_checks = raw.get("checks")
        if not isinstance(raw_checks, list) or not raw_checks:
            raise ConfigError("checks: need at least one check")
        checks = []
        for i, entry in enumerate(raw_checks):
            if isinstance(entry, str):
                entry = {"name": entry}
            if not isinstance(entry, dict) or "name" not in entry:
                raise ConfigError(
                    f"checks[{i}]: must be a check name or a mapping "
                    f"with a 'name' field")
            name = entry["name"]
            if name not in CHECK_PARAMS:
                raise ConfigError(
                    f"checks[{i}].name: unknown check {name!r} "
                    f"(choose from {', '.join(sorted(CHECK_PARAMS))})")
            params = {k: v for k, v in entry.items()
                      if k not in ("name", "times", "angles")}
            grid_override = {}
            if "times" in entry:
                ts = entry["times"]
                if (not isinstance(ts, list) or not ts
                        or not all(isinstance(t, (int, float)) and t > 0
                                   for t in ts)):
                    raise ConfigError(
                        f"checks[{i}].times: need a nonempty list of "
                        f"positive numbers")
                grid_override["times"] = [float(t) for t in sorted(ts)]
            if "angles" in entry:
                asl = entry["angles"]
                if (not isinstance(asl, list) or not asl
                        or not all(isinstance(a, (int, float)) for a in asl)):
                    raise ConfigError(
                        f"checks[{i}].angles: need a list of numbers")
                for a in asl:
                    if abs(a) >= np.pi / 2:
                        raise ConfigError(
                            f"checks[{i}].angles: {a:.4f} is outside the "
                            f"open sector (|angle| < pi/2)")
                grid_override["angles"] = [float(a) for a in asl]
            for k, v in params.items():
                if k not in CHECK_PARAMS[name]:
                    raise ConfigError(
                        f"checks[{i}].{k}: not a parameter of {name!r} "
                        f"(allowed: {', '.join(sorted(CHECK_PARAMS[name])) or 'none'})")
                if k in _TOLERANCE_KEYS:
                    if not isinstance(v, (int, float)) or v <= 0:
                        raise ConfigError(
                            f"checks[{i}].{k}: tolerance must be > 0, "
                            f"got {v!r}")
            checks.append({"name": name, "params": params, **grid_override})

        seed = raw.get("seed", 0)
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError(f"seed: need a nonnegative integer, got {seed!r}")
        out_dir = Path(raw.get("out", "out"))
        cache_raw = raw.get("cache")
        cache_dir = Path(cache_raw) if cache_raw else None
        return cls(domain, potential, backend, resolutions, times, angles,
                   checks, out_dir, cache_dir, seed)


def load_config(path):
    """Parse and validate a YAML experiment config.

    Parse errors carry the line/column of the offending text; validation
    errors name the field.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = (f" at line {mark.line + 1}, column {mark.column + 1}"
                 if mark else "")
        problem = getattr(e, "problem", None) or str(e)
        raise ConfigError(f"config parse error{where}: {problem}") from None
    return ExperimentConfig.from_dict(raw)


# ---------------------------------------------------------------------------
# running checks


def _bound_spec(params):
    if "cos_power" in params:
        return BoundSpec(cos_power=float(params["cos_power"]))
    return None


def _parse_pq(v, default):
    if v is None:
        return default
    if isinstance(v, str):
        if v != "inf":
            raise ConfigError(f"p/q: expected a number or 'inf', got {v!r}")
        return np.inf
    return float(v)


def _run_one_check(cfg, entry, ops, resolution):
    """Run one (check, resolution-or-family) job; returns a report."""
    name, params = entry["name"], entry["params"]
    times = entry.get("times", cfg.times)
    angles = entry.get("angles", cfg.angles)
    grid = SweepGrid(tuple(times), tuple(angles), seed=cfg.seed)
    op = None if resolution is None else ops[resolution]
    family = [ops[r] for r in cfg.resolutions]
    if name == "poisson":
        return poisson_sup_ratio(family, grid,
                                 spec=_bound_spec(params),
                                 distance=params.get("distance", "euclidean"))
    if name == "derivative":
        orders = (int(params.get("k", 1)), int(params.get("l", 0)))
        return derivative_bound_check(family, grid, orders=orders,
                                      spec=_bound_spec(params))
    if name == "sector":
        return sector_holomorphy_sweep(family, angles, times)
    if name == "domination":
        versus = params.get("versus", 0.0)
        other, _ = fetch_operator(cfg.domain, versus, cfg.backend, resolution,
                                  cache_dir=cfg.cache_dir)
        return domination_check(other, op, times,
                                tol=params.get("tol", 1e-8))
    if name == "submarkov":
        return submarkov_check(
            op, times,
            tol_equality=params.get("tol_equality", 1e-6),
            tol_upper=params.get("tol_upper", 1e-8),
            tol_positive=params.get("tol_positive", 1e-8))
    if name == "slope":
        p = _parse_pq(params.get("p"), 1.0)
        q = _parse_pq(params.get("q"), np.inf)
        return lplq_slope(op, p, q, times,
                          slope_slack=params.get("slope_slack", 0.15))
    if name == "commutator":
        wit = sample_witnesses(op.boundary, int(params.get("n_witnesses", 8)),
                               seed=cfg.seed)
        return commutator_growth_check(
            op, wit, grid, d_iter=int(params.get("iterations", 2)),
            cos_power=params.get("cos_power"))
    if name == "convolution":
        return convolution_check(
            op.boundary, times,
            variation_limit=params.get("variation_limit", 2.0),
            max_pairs=int(params.get("max_pairs", 4096)), seed=cfg.seed)
    raise ConfigError(f"unknown check {name!r}")


def _jobs_for(cfg):
    """Ordered (label, entry, resolution) jobs; family checks run once."""
    jobs = []
    for entry in cfg.checks:
        if entry["name"] in FAMILY_CHECKS:
            jobs.append((entry["name"], entry, None))
        else:
            for r in cfg.resolutions:
                jobs.append((f"{entry['name']}-n{r}", entry, r))
    return jobs


def run_experiment(cfg, jobs=1):
    """Build operators, run all configured checks, write artifacts.

    Returns (exit_status, report_paths); status 0 iff every check passed.
    """
    ops = {}
    for r in cfg.resolutions:
        ops[r], _ = fetch_operator(cfg.domain, cfg.potential, cfg.backend, r,
                                   cache_dir=cfg.cache_dir)
    joblist = _jobs_for(cfg)

    def run(job):
        label, entry, resolution = job
        try:
            return label, _run_one_check(cfg, entry, ops, resolution)
        except ValueError as e:
            raise RuntimeError(f"check {label!r} failed to run: {e}") from e

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, joblist))
    else:
        results = [run(j) for j in joblist]

    paths = emit_report(results, cfg)
    paths += _emit_kernel_slices(cfg, ops)
    status = 0 if all(rep.passed for _, rep in results) else 1
    return status, paths


# ---------------------------------------------------------------------------
# artifacts


def _write_json(path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return path


def _curve_rows(rep):
    """Per-time plot data for a report, if it carries any."""
    m = rep.measured
    if "per_time" in m:
        keys = [k for k in m["per_time"][0] if k != "t"]
        return (["t"] + keys,
                [[row["t"]] + [row[k] for k in keys] for row in m["per_time"]])
    if "norms" in m:
        return (["t", "norm"],
                list(map(list, zip(rep.grid["times"], m["norms"]))))
    return None


def emit_report(results, cfg):
    """Write one JSON per report plus a sorted summary and curve CSVs."""
    if not results:
        raise ValueError("no reports to emit")
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    summary_rows = []
    for label, rep in results:
        d = rep.to_dict()
        d["seed"] = cfg.seed
        paths.append(_write_json(out / f"report-{label}.json", d))
        curve = _curve_rows(rep)
        if curve is not None:
            paths.append(_write_csv(out / f"curve-{label}.csv", *curve))
        summary_rows.append({"label": label, "check": rep.check,
                             "verdict": rep.verdict, "backend": rep.backend})
    n_pass = sum(r["verdict"] == "pass" for r in summary_rows)
    summary = {"schema": SCHEMA_VERSION, "seed": cfg.seed,
               "n_pass": n_pass, "n_fail": len(summary_rows) - n_pass,
               "checks": summary_rows}
    paths.append(_write_json(out / "summary.json", summary))
    return paths


def _sample_pairs(n, max_pairs, seed):
    if n * n <= max_pairs:
        ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        return ii.ravel(), jj.ravel()
    rng = np.random.default_rng(seed)
    ii = rng.integers(0, n, size=max_pairs)
    jj = rng.integers(0, n, size=max_pairs)
    return ii, jj


def _emit_kernel_slices(cfg, ops, max_pairs=2048):
    """One sampled kernel-slice CSV per resolution at the median time."""
    paths = []
    t = cfg.times[len(cfg.times) // 2]
    for r in cfg.resolutions:
        op = ops[r]
        K = kernel_matrix(op, t).values
        ii, jj = _sample_pairs(op.n_nodes, max_pairs, cfg.seed)
        dist = np.linalg.norm(op.boundary.nodes[ii] - op.boundary.nodes[jj],
                              axis=-1)
        rows = [[int(i), int(j), float(d), float(np.real(v)), float(np.imag(v))]
                for i, j, d, v in zip(ii, jj, dist, K[ii, jj])]
        paths.append(_write_csv(cfg.out_dir / f"kernel-n{r}-t{t:g}.csv",
                                ["x_index", "y_index", "distance", "re", "im"],
                                rows))
    return paths


def sweep_rows(op, times, angles, spec=None, distance="euclidean"):
    """Weighted kernel sup-ratio at every (t, angle) grid point."""
    from .verify import _distance_matrix

    spec = spec or BoundSpec()
    dist = _distance_matrix(op.boundary, distance)
    lam1 = op.lambda_min
    rows = []
    for th in angles:
        for t in times:
            z = t * complex(np.cos(th), np.sin(th))
            K = kernel_matrix(op, z).values
            az = abs(z)
            wgt = ((1.0 + dist / az) ** spec.poisson_exponent
                   * min(az, 1.0) ** spec.time_exponent
                   * np.exp(lam1 * z.real)
                   * np.cos(th) ** spec.cos_power)
            rows.append([float(t), float(th),
                         float(np.max(np.abs(K) * wgt))])
    return rows


# ---------------------------------------------------------------------------
# subcommands


def _cmd_assemble(cfg, args):
    for r in cfg.resolutions:
        op, source = fetch_operator(cfg.domain, cfg.potential, cfg.backend, r,
                                    cache_dir=cfg.cache_dir)
        print(f"n={r}: {source} ({op.provenance}, "
              f"{op.n_eigenpairs} eigenpairs)")
    return 0


def _cmd_spectrum(cfg, args):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for r in cfg.resolutions:
        op, _ = fetch_operator(cfg.domain, cfg.potential, cfg.backend, r,
                               cache_dir=cfg.cache_dir)
        path = _write_csv(cfg.out_dir / f"spectrum-n{r}.csv",
                          ["index", "eigenvalue"],
                          [[i, float(ev)] for i, ev in
                           enumerate(op.eigenvalues)])
        print(path)
    return 0


def _cmd_kernel(cfg, args):
    ops = {}
    for r in cfg.resolutions:
        ops[r], _ = fetch_operator(cfg.domain, cfg.potential, cfg.backend, r,
                                   cache_dir=cfg.cache_dir)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for p in _emit_kernel_slices(cfg, ops):
        print(p)
    return 0


def _cmd_verify(cfg, args):
    status, paths = run_experiment(cfg, jobs=args.jobs)
    for p in paths:
        print(p)
    summary = json.loads((cfg.out_dir / "summary.json").read_text())
    print(f"{summary['n_pass']} passed, {summary['n_fail']} failed")
    return status


def _cmd_sweep(cfg, args):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for r in cfg.resolutions:
        op, _ = fetch_operator(cfg.domain, cfg.potential, cfg.backend, r,
                               cache_dir=cfg.cache_dir)
        rows = sweep_rows(op, cfg.times, cfg.angles)
        path = _write_csv(cfg.out_dir / f"sweep-n{r}.csv",
                          ["t", "theta", "sup_ratio"], rows)
        print(path)
    return 0


def _cmd_report(cfg, args):
    out = cfg.out_dir
    reports = sorted(out.glob("report-*.json"))
    if not reports:
        print(f"no report-*.json files under {out}", file=sys.stderr)
        return 2
    rows = []
    for p in reports:
        d = json.loads(p.read_text())
        rows.append({"label": p.stem[len("report-"):], "check": d["check"],
                     "verdict": d["verdict"], "backend": d["backend"]})
    n_pass = sum(r["verdict"] == "pass" for r in rows)
    summary = {"schema": SCHEMA_VERSION, "seed": cfg.seed,
               "n_pass": n_pass, "n_fail": len(rows) - n_pass, "checks": rows}
    print(_write_json(out / "summary.json", summary))
    return 0 if n_pass == len(rows) else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dtnlab",
        description="Steklov spectra, boundary heat flows, and bound checks "
                    "on planar domains")
    parser.add_argument("--config", required=True, help="YAML experiment file")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--cache", help="cache directory (overrides config "
                                        "and DTNLAB_CACHE)")
    parser.add_argument("--seed", type=int, help="seed (overrides config)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel check jobs")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in [("assemble", _cmd_assemble), ("spectrum", _cmd_spectrum),
                     ("kernel", _cmd_kernel), ("verify", _cmd_verify),
                     ("sweep", _cmd_sweep), ("report", _cmd_report)]:
        sp = sub.add_parser(name)
        sp.set_defaults(handler=fn)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out:
            cfg.out_dir = Path(args.out)
        if args.cache:
            cfg.cache_dir = Path(args.cache)
        if args.seed is not None:
            cfg.seed = args.seed
        return args.handler(cfg, args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except RuntimeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
