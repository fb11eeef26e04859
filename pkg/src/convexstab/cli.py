"""
Command line driver.

    convexstab gen            CONFIG   corpus files and manifest
    convexstab convexify      CONFIG   comparison sets over a corpus
    convexstab alexandrov     CONFIG   Alexandrov reports over a corpus
    convexstab counterexample CONFIG   the sharpness experiment
    convexstab plane          CONFIG   the planar inequalities over polygons
    convexstab selftest      [CONFIG]  the acceptance suite

Configuration is one JSON file validated against ``CONFIG_SCHEMA`` before
any computation; the only environment override is ``CONVEXSTAB_OUTPUT_DIR``.
Every run writes ``resolved_config.json`` next to its CSV/JSON/SVG outputs.
Exit status: 0 when every assertion holds, 1 on the first failing
assertion (named on stderr), 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, fileio, svgplot
from . import corpus as cp
from . import planar as pg
from . import setcalc as sc
from . import stabfun
from .sphgrid import BALL_VOLUME

COMMANDS = ("gen", "convexify", "alexandrov", "counterexample", "plane", "selftest")
OUTPUT_ENV = "CONVEXSTAB_OUTPUT_DIR"
EL_RESIDUAL_MAX = 1e-4

_pos = {"type": "number", "exclusiveMinimum": 0}
_posint = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "output_dir": {"type": "string"},
        "workers": _posint,
        "svg_timestamp": {"type": "boolean"},
        "corpus": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "kind": {"enum": list(cp.KINDS)},
                "count": {"type": "integer", "minimum": 0},
                "seed": {"type": "integer", "minimum": 0},
                "sigma": {"type": "number", "exclusiveMinimum": 0, "maximum": cp.SIGMA_MAX},
                "L": {"type": "integer", "minimum": 2, "maximum": 128},
                "n": {"enum": [2, 3]},
                "params": {"type": "object"},
            },
            "oneOf": [{"required": ["path"]}, {"required": ["kind"], "not": {"required": ["path"]}}],
        },
        "pipeline": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "lam": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.1},
                "sigma": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.05},
                "L": {"type": "integer", "minimum": 4, "maximum": 64},
                "max_iters": _posint,
                "grad_tol": _pos,
                "mollifier_delta": {"type": "number", "minimum": 1e-10, "maximum": 1e-6},
                "profile": {"enum": ["log", "linear"]},
                "epsilon_override": {"type": ["number", "null"], "minimum": 0},
                "min_converged_fraction": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
        "alexandrov": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "L": {"type": ["integer", "null"], "minimum": 2, "maximum": 128},
                "refine_L": {"type": ["integer", "null"], "minimum": 2, "maximum": 128},
                "refine_tol": _pos,
                "enforce_barycenter": {"type": "boolean"},
                "ps": {"type": "array", "items": {"type": "number", "minimum": 1}, "minItems": 1},
            },
        },
        "counterexample": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "thetas": {
                    "type": "array",
                    "items": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
                    "minItems": 1,
                },
                "lam": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.1},
                "L": {"type": "integer", "minimum": 8, "maximum": 64},
                "chart_radius": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.2},
                "max_iters": _posint,
            },
        },
        "plane": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"slack_tol": {"type": "number", "minimum": 0}},
        },
        "selftest": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "criteria": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 1, "maximum": 11},
                    "uniqueItems": True,
                }
            },
        },
    },
}

DEFAULTS = {
    "output_dir": "convexstab_out",
    "workers": 1,
    "svg_timestamp": False,
    "pipeline": {
        "lam": 0.1,
        "sigma": 0.05,
        "L": 16,
        "max_iters": 200,
        "grad_tol": 1e-6,
        "mollifier_delta": 1e-6,
        "profile": "log",
        "epsilon_override": None,
        "min_converged_fraction": 0.95,
    },
    "alexandrov": {"L": None, "refine_L": None, "refine_tol": 0.02, "enforce_barycenter": True, "ps": [2, 4]},
    "counterexample": {"thetas": [0.3, 0.2, 0.1], "lam": 0.1, "L": 32, "chart_radius": 0.2, "max_iters": 200},
    "plane": {"slack_tol": 1e-12},
    "selftest": {"criteria": list(range(1, 12))},
}

CORPUS_DEFAULTS = {"count": 1, "seed": 0, "sigma": 0.05, "L": 16, "n": 3, "params": {}}
PLANE_CORPUS = {"kind": "planar_star", "count": 1000, "seed": 0, "sigma": 0.4, "n": 2}

# sections that each command reads
SECTIONS = {
    "gen": ("corpus",),
    "convexify": ("corpus", "pipeline"),
    "alexandrov": ("corpus", "alexandrov"),
    "counterexample": ("counterexample",),
    "plane": ("corpus", "plane"),
    "selftest": ("selftest",),
}


class ConfigError(ValueError):
    """Invalid configuration (exit status 2)."""


class AssertionFailure(RuntimeError):
    """A declared assertion does not hold (exit status 1)."""


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------


def resolve_config(command: str, raw: dict) -> dict:
    """Validate ``raw`` and fill defaults for the sections ``command`` uses."""
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config schema violation at {where}: {exc.message}") from None
    cfg = {k: copy.deepcopy(raw.get(k, DEFAULTS[k])) for k in ("output_dir", "workers", "svg_timestamp")}
    for sec in SECTIONS[command]:
        if sec == "corpus":
            if "corpus" in raw:
                c = copy.deepcopy(raw["corpus"])
                cfg["corpus"] = c if "path" in c else {**CORPUS_DEFAULTS, **c}
            elif command == "plane":
                cfg["corpus"] = {**CORPUS_DEFAULTS, **PLANE_CORPUS}
            else:
                raise ConfigError(f"command {command!r} needs a 'corpus' section")
        else:
            cfg[sec] = {**DEFAULTS[sec], **copy.deepcopy(raw.get(sec, {}))}
    if command == "gen" and "path" in cfg["corpus"]:
        raise ConfigError("'gen' needs a corpus spec, not a path")
    return cfg


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        raw = fileio.read_json(path)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except ValueError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return raw


# ----------------------------------------------------------------------
# output helpers
# ----------------------------------------------------------------------


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple)):
        return ";".join(str(_cell(x)) for x in v)
    return str(v)


def write_csv(path: Path, rows: list, columns: list | None = None) -> None:
    columns = columns or (list(rows[0]) if rows else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    path.write_text(buf.getvalue())


class Asserts:
    """Ordered named assertions; ``raise_first`` reports the first failure."""

    def __init__(self):
        self.items = []

    def add(self, name: str, ok: bool):
        self.items.append({"assertion": name, "passed": bool(ok)})

    def summary(self) -> list:
        return list(self.items)

    def raise_first(self):
        for it in self.items:
            if not it["passed"]:
                raise AssertionFailure(it["assertion"])


def _load_corpus(cfg: dict) -> tuple:
    c = cfg["corpus"]
    if "path" in c:
        try:
            spec, members = cp.read_corpus(c["path"])
        except (cp.CorpusError, OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot read corpus: {exc}") from None
        return spec.to_dict(), members
    try:
        spec = cp.CorpusSpec(**c)
    except (TypeError, cp.CorpusError) as exc:
        raise ConfigError(f"invalid corpus spec: {exc}") from None
    return spec.to_dict(), cp.generate(spec)


def _map(fn, items, workers: int) -> list:
    """Apply ``fn`` in corpus order, optionally on a process pool."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _spherical(members) -> bool:
    return all(not isinstance(m, pg.Polygon) for m in members)


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------


def cmd_gen(cfg: dict, out: Path) -> Asserts:
    spec = cp.CorpusSpec(**cfg["corpus"])
    members = cp.generate(spec)
    cdir = out / "corpus"
    cdir.mkdir(parents=True, exist_ok=True)
    names = []
    rows = []
    for k, m in enumerate(members):
        name = f"member_{k:04d}.json"
        fileio.write_json(cdir / name, fileio.member_to_json(m))
        names.append(name)
        if isinstance(m, pg.Polygon):
            rows.append({"index": k, "file": name, "type": "polygon", "vertices": len(m), "area": pg.area(m), "convex": pg.is_convex(m)})
        else:
            rows.append(
                {
                    "index": k,
                    "file": name,
                    "type": "set",
                    "volume": sc.volume(m),
                    "u_Linf": m.sigma_bound["Linf"],
                    "u_W1inf": m.sigma_bound["W1inf"],
                    "convexity_margin": sc.convexity_margin(m),
                }
            )
    fileio.write_json(cdir / "manifest.json", {"spec": spec.to_dict(), "members": names, "generator": "numpy Philox4x64, stream jumped by member index"})
    a = Asserts()
    a.add("corpus is non-empty", len(members) > 0)
    for r in rows:
        if r["type"] == "set":
            a.add(f"member {r['index']}: volume = |B| to 1e-12", abs(r["volume"] - BALL_VOLUME[spec.n]) <= 1e-12)
            if spec.kind != "counterexample":
                a.add(f"member {r['index']}: amplitude <= sigma", max(r["u_Linf"], r["u_W1inf"]) <= spec.sigma * (1 + 1e-12))
    write_csv(out / "gen.csv", rows, sorted({k for r in rows for k in r}, key=_gen_order))
    fileio.write_json(out / "gen.json", {"spec": spec.to_dict(), "members": rows, "assertions": a.summary()})
    return a


def _gen_order(k):
    order = ["index", "file", "type", "volume", "u_Linf", "u_W1inf", "convexity_margin", "vertices", "area", "convex"]
    return order.index(k) if k in order else len(order)


CONVEXIFY_COLUMNS = [
    "index",
    "converged",
    "iterations",
    "el_residual",
    "mu_hat",
    "energy",
    "lam",
    "perimeter_E",
    "perimeter_F",
    "volume_E",
    "volume_F",
    "symdiff",
    "lhs",
    "rhs",
    "slack",
    "convexity_margin",
    "convex",
    "v_Linf",
    "v_W1inf",
    "v_D2inf",
    "v_C1",
    "v_C2",
    "in_class",
    "epsilon",
    "rho",
    "x0",
    "flags",
    "error",
]


def _convexify_one(job):
    from . import pipeline as pl
    from .varmin import MinimizeConfig

    k, member, p = job
    E = fileio.member_from_json(member)
    mcfg = MinimizeConfig(
        lam=p["lam"], L=p["L"], max_iters=p["max_iters"], grad_tol=p["grad_tol"], mollifier_delta=p["mollifier_delta"], profile=p["profile"]
    )
    cfg = pl.PipelineConfig(lam=p["lam"], sigma=p["sigma"], minimize=mcfg, epsilon_override=p["epsilon_override"], profile=p["profile"])
    try:
        d = pl.construct_F(E, cfg).to_dict()
        d["error"] = ""
    except (pl.PipelineError, ValueError, RuntimeError) as exc:
        d = {"converged": False, "error": f"{type(exc).__name__}: {exc}"}
    d["index"] = k
    return d


def cmd_convexify(cfg: dict, out: Path) -> Asserts:
    spec, members = _load_corpus(cfg)
    if not members:
        raise ConfigError("empty corpus")
    if not _spherical(members):
        raise ConfigError("convexify needs a corpus of nearly spherical sets")
    p = cfg["pipeline"]
    jobs = [(k, fileio.member_to_json(m), p) for k, m in enumerate(members)]
    rows = _map(_convexify_one, jobs, cfg["workers"])
    a = Asserts()
    good = [r for r in rows if r.get("converged") and r.get("el_residual", math.inf) <= EL_RESIDUAL_MAX]
    for r in rows:
        a.add(f"member {r['index']}: pipeline ran", not r["error"])
    for r in good:
        k = r["index"]
        a.add(f"member {k}: P(E) - P(F) >= lambda f(|E delta F|) - 1e-8", r["slack"] >= -1e-8)
        a.add(f"member {k}: F convex", r["convexity_margin"] > 0)
        a.add(f"member {k}: |F| = |E| to 1e-8", abs(r["volume_F"] - r["volume_E"]) <= 1e-8)
    frac = len(good) / len(rows)
    a.add(f"converged fraction >= {p['min_converged_fraction']}", frac >= p["min_converged_fraction"])
    write_csv(out / "convexify.csv", rows, CONVEXIFY_COLUMNS)
    summary = {
        "members": len(rows),
        "converged": len(good),
        "converged_fraction": frac,
        "min_slack": min((r["slack"] for r in good), default=None),
        "in_class": sum(1 for r in good if r["in_class"]),
        "all_convex": all(r["convex"] for r in good),
    }
    fileio.write_json(out / "convexify.json", {"corpus": spec, "summary": summary, "rows": rows, "assertions": a.summary()})
    ch = svgplot.Chart("Stability inequality", "|E delta F|", "P(E) - P(F)", logx=True, logy=True)
    ch.add([r["symdiff"] for r in good], [r["lhs"] for r in good], "measured P(E) - P(F)")
    ts = [r["symdiff"] for r in good if r["symdiff"] > 0]
    if ts:
        grid = np.geomspace(min(ts), max(ts), 50)
        ch.add(grid, p["lam"] * stabfun.f(grid), "lambda f(t)", kind="line")
    ch.save(out / "convexify.svg", timestamp=cfg["svg_timestamp"])
    return a


def _alex_one(job):
    from . import alexandrov as al

    k, member, p = job
    E = fileio.member_from_json(member)
    d = al.alex_check(E, L=p["L"], enforce_barycenter=p["enforce_barycenter"], ps=tuple(p["ps"])).to_dict()
    if p["refine_L"]:
        d["ratio_refined"] = al.alex_check(E, L=p["refine_L"], enforce_barycenter=p["enforce_barycenter"], ps=tuple(p["ps"])).ratio
        d["refine_drift"] = abs(d["ratio_refined"] / d["ratio"] - 1.0)
    d["index"] = k
    return d


def cmd_alexandrov(cfg: dict, out: Path) -> Asserts:
    spec, members = _load_corpus(cfg)
    if not members:
        raise ConfigError("empty corpus")
    if not _spherical(members):
        raise ConfigError("alexandrov needs a corpus of nearly spherical sets")
    p = cfg["alexandrov"]
    jobs = [(k, fileio.member_to_json(m), p) for k, m in enumerate(members)]
    rows = _map(_alex_one, jobs, cfg["workers"])
    a = Asserts()
    for r in rows:
        a.add(f"member {r['index']}: ratio finite", math.isfinite(r["ratio"]))
        if p["refine_L"]:
            a.add(f"member {r['index']}: refinement drift <= {p['refine_tol']}", r["refine_drift"] <= p["refine_tol"])
    cols = ["index"] + [c for c in rows[0] if c != "index"]
    write_csv(out / "alexandrov.csv", rows, cols)
    ratios = [r["ratio"] for r in rows]
    summary = {"members": len(rows), "max_ratio": max(ratios), "min_ratio": min(ratios), "all_confident": all(r["curvature_confident"] for r in rows)}
    fileio.write_json(out / "alexandrov.json", {"corpus": spec, "summary": summary, "rows": rows, "assertions": a.summary()})
    ch = svgplot.Chart("Alexandrov ratio", "|H delta B|", "ratio", logx=True)
    ch.add([r["symdiff_to_ball"] for r in rows], ratios, "(|w|_W12 + |mu* - (n-1)|) / inf |S - mu|_W-12")
    ch.save(out / "alexandrov.svg", timestamp=cfg["svg_timestamp"])
    return a


def cmd_counterexample(cfg: dict, out: Path) -> Asserts:
    from . import counterex as cx

    p = cfg["counterexample"]
    sets = []
    for th in p["thetas"]:
        ts = cx.build_E_theta(cx.CounterexampleConfig(theta=th, chart_radius=p["chart_radius"], lam=p["lam"], L=p["L"], max_iters=p["max_iters"]))
        sets.append(ts)
    rep = cx.sharpness_experiment(
        p["thetas"], lam=p["lam"], L=p["L"], chart_radius=p["chart_radius"], sets=[(t.theta, t.E) for t in sets], max_iters=p["max_iters"]
    )
    rows = [r.to_dict() for r in rep.rows]
    a = Asserts()
    for t in sets:
        a.add(f"theta {t.theta:g}: E_theta non-convex", t.margin < 0)
        a.add(f"theta {t.theta:g}: volume = |B| to 1e-12", abs(sc.volume(t.E) - BALL_VOLUME[3]) <= 1e-12)
    for t in sets:
        for k in ("W1inf", "laplacian", "hessian"):
            a.add(f"theta {t.theta:g}: {k} bracket within factor 2", t.brackets[k])
    a.add("rho strictly decreasing as theta decreases", rep.rho_decreasing)
    a.add("rho fit through the origin has positive slope", rep.slope_positive)
    a.add("log-profile slack >= 0 on every run", rep.log_profile_slack_ok)
    a.add("rho < lambda at the smallest theta", rep.rho_below_lambda_at_smallest)
    write_csv(out / "counterexample.csv", rows)
    write_csv(out / "counterexample_sets.csv", [t.to_dict() for t in sets])
    body = rep.to_dict()
    body["sets"] = [t.to_dict() for t in sets]
    body["assertions"] = a.summary()
    fileio.write_json(out / "counterexample.json", body)
    ch = svgplot.Chart("Sharpness family", "theta", "rho(theta) = (P(E) - P(F)) / |E delta F|")
    ch.add([r["theta"] for r in rows], [r["rho"] for r in rows], "measured rho")
    if rows and math.isfinite(rep.slope):
        xs = [0.0, max(r["theta"] for r in rows)]
        ch.add(xs, [rep.slope * x for x in xs], f"fit rho = {rep.slope:.3g} theta", kind="line")
    ch.save(out / "counterexample.svg", timestamp=cfg["svg_timestamp"])
    return a


def cmd_plane(cfg: dict, out: Path) -> Asserts:
    spec, members = _load_corpus(cfg)
    if not members:
        raise ConfigError("empty corpus")
    if _spherical(members):
        raise ConfigError("plane needs a corpus of polygons")
    tol = cfg["plane"]["slack_tol"]
    rows = []
    for k, P in enumerate(members):
        d = pg.appendix_check(P).to_dict()
        d["index"] = k
        rows.append(d)
    a = Asserts()
    a.add(f"first inequality slack >= -{tol:g}", min(r["slack_plane"] for r in rows) >= -tol)
    a.add(f"second inequality slack >= -{tol:g}", min(r["slack_plane2"] for r in rows) >= -tol)
    a.add("convex inputs give zero slack", all(r["slack_plane"] == 0.0 and r["slack_plane2"] == 0.0 for r in rows if r["convex"]))
    cols = ["index"] + [c for c in rows[0] if c != "index"]
    write_csv(out / "plane.csv", rows, cols)
    summary = {
        "polygons": len(rows),
        "non_convex": sum(1 for r in rows if not r["convex"]),
        "min_slack_plane": min(r["slack_plane"] for r in rows),
        "min_slack_plane2": min(r["slack_plane2"] for r in rows),
    }
    fileio.write_json(out / "plane.json", {"corpus": spec, "summary": summary, "rows": rows, "assertions": a.summary()})
    ch = svgplot.Chart("Planar convexification", "|E delta F|", "P(E) - P(F)")
    nc = [r for r in rows if not r["convex"]]
    ch.add([r["symdiff_EF"] for r in nc], [r["lhs_plane2"] for r in nc], "measured")
    if nc:
        top = max(r["symdiff_EF"] for r in nc)
        ch.add([0.0, top], [0.0, top / (2.0 * math.sqrt(2.0))], "t / (2 sqrt 2)", kind="line")
    ch.save(out / "plane.svg", timestamp=cfg["svg_timestamp"])
    worst = next((members[r["index"]] for r in sorted(nc, key=lambda r: r["slack_plane2"])), None)
    if worst is not None:
        svgplot.polygon_overlay(
            [worst.vertices.tolist(), pg.convex_hull(worst).vertices.tolist()], ["E (tightest case)", "convex hull"], out / "plane_tightest.svg", timestamp=cfg["svg_timestamp"]
        )
    return a


def cmd_selftest(cfg: dict, out: Path) -> Asserts:
    from . import acceptance

    checks = acceptance.run_all(sorted(cfg["selftest"]["criteria"]), echo=print)
    a = Asserts()
    for c in checks:
        a.add(f"criterion {c.number} ({c.name}): {c.detail}" if not c.passed else f"criterion {c.number} ({c.name})", c.passed)
    rows = [{"criterion": c.number, "name": c.name, "passed": c.passed} for c in checks]
    write_csv(out / "selftest.csv", rows)
    fileio.write_json(out / "selftest.json", {"criteria": rows, "assertions": a.summary()})
    return a


HANDLERS = {
    "gen": cmd_gen,
    "convexify": cmd_convexify,
    "alexandrov": cmd_alexandrov,
    "counterexample": cmd_counterexample,
    "plane": cmd_plane,
    "selftest": cmd_selftest,
}


# ----------------------------------------------------------------------
# entry points
# ----------------------------------------------------------------------


def run(command: str, config, output_dir=None, stderr=None) -> int:
    """Run ``command`` with a config dict (or path); returns the exit status."""
    stderr = sys.stderr if stderr is None else stderr
    try:
        if command not in HANDLERS:
            raise ConfigError(f"unknown command {command!r}")
        raw = config if isinstance(config, dict) else load_config(config)
        cfg = resolve_config(command, raw)
        out = Path(output_dir or os.environ.get(OUTPUT_ENV) or cfg["output_dir"])
        cfg["output_dir"] = str(out)
        out.mkdir(parents=True, exist_ok=True)
        fileio.write_json(out / "resolved_config.json", {"command": command, "version": __version__, "config": cfg})
        HANDLERS[command](cfg, out).raise_first()
    except ConfigError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except AssertionFailure as exc:
        print(f"assertion failed: {exc}", file=stderr)
        return 1
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="convexstab", description="Convex comparison sets and stability checks for nearly spherical sets.")
    ap.add_argument("--version", action="version", version=f"convexstab {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("config", nargs="?", help="JSON config file (optional for selftest)")
    args = ap.parse_args(argv)
    if args.config is None and args.command != "selftest":
        print(f"error: command {args.command!r} needs a config file", file=sys.stderr)
        return 2
    return run(args.command, args.config if args.config is not None else {})


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
