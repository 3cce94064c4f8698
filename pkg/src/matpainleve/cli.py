"""Command-line front end.

Every subcommand writes a report (JSON, CSV or text) to stdout or to
``--output`` and exits with 0 when all checks pass, 1 when a check fails and
2 on an invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import checks
from . import degeneration as dg
from .catalog import DEFAULT_VARIANT, LAX_CATALOG, VARIANTS, get_variant, random_theta
from .painleve_core import SystemId

SCHEMA_VERSION = 1
COMMANDS = ("list-systems", "integrate", "residual", "spectral-type", "riemann-scheme", "degenerate", "laplace",
            "verify-all")
FORMATS = ("json", "csv", "text")


class ConfigError(ValueError):
    """Invalid command-line configuration (exit code 2)."""


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "json"
    system: str | None = None
    eps_grid: tuple | None = None
    steps: int = 1000
    rule: str | None = None
    draws: int | None = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        unknown = set(self.tolerances) - set(checks.DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys {sorted(unknown)}; known: {sorted(checks.DEFAULT_TOLERANCES)}")
        if self.eps_grid is not None:
            g = list(self.eps_grid)
            if not g or any(not 0 < x <= 0.5 for x in g) or any(b >= a for a, b in zip(g, g[1:])):
                raise ConfigError("--eps-grid must be strictly decreasing values in (0, 0.5]")
        if self.steps < 0:
            raise ConfigError("--steps must be nonnegative")
        if self.system is not None:
            try:
                get_variant(self.system)
            except KeyError as exc:
                raise ConfigError(str(exc)) from exc
        if self.rule is not None:
            try:
                dg.get_rule(self.rule)
            except KeyError as exc:
                raise ConfigError(str(exc)) from exc
        return self


# ---------------------------------------------------------------------------
# commands; each returns a list of CheckResult and optional extra payload


def _variant(cfg, default="22,22,22,211"):
    return get_variant(cfg.system or default)


def _cmd_list_systems(cfg):
    graph = dg.degeneration_graph()
    payload = {
        "hamiltonians": [s.value for s in SystemId],
        "default_variants": {s.value: DEFAULT_VARIANT[s] for s in SystemId},
        "lax_catalog": list(LAX_CATALOG),
        "variants": {name: {"system": v.system.value, "pattern": v.pattern, "lax_pair": v.has_lax}
                     for name, v in VARIANTS.items()},
        "degeneration_nodes": graph["nodes"],
        "degeneration_edges": [list(e) for e in graph["edges"]],
        "degeneration_dot": dg.graph_dot(),
    }
    res = [checks.CheckResult("catalog", "hamiltonian count", len(payload["hamiltonians"]) == 8,
                              len(payload["hamiltonians"]), 8),
           checks.CheckResult("catalog", "degeneration edge count", len(graph["edges"]) == 18,
                              len(graph["edges"]), 18),
           checks.CheckResult("catalog", "degeneration node count", True, len(graph["nodes"]), None,
                              {"note": "counts distinct source and target variants"})]
    return res, payload


def _cmd_integrate(cfg):
    from .painleve_core import build_matrix_pair, integrate_pairs, state_from_pair
    from .catalog import zeta_value

    var = _variant(cfg)
    rng = np.random.default_rng(cfg.seed)
    th = random_theta(var.name, rng)
    s0 = checks.random_state(rng, scale=0.3)
    mp = build_matrix_pair(var.system, th, s0)
    z = zeta_value(var, th)
    K = np.diag([z, -z])
    path = integrate_pairs(var.name, th, mp.Q, mp.P, s0.t, s0.t + 0.5, cfg.steps, tol=None)
    drift = 0.0
    for Q, P, _ in path:
        norm = max(np.abs(Q).max(), np.abs(P).max())
        drift = max(drift, float(np.abs(P @ Q - Q @ P - K).max() / (1 + norm)))
    tol = cfg.tolerances.get("conservation", checks.DEFAULT_TOLERANCES["conservation"])
    enc = [[_c(x) for x in state_from_pair(Q, P, t).as_array()] for Q, P, t in path]
    res = [checks.CheckResult("integrate", f"commutator drift {var.name}", drift <= tol, drift, tol,
                              {"steps": cfg.steps, "length": 0.5})]
    return res, {"variant": var.name, "theta": {k: _c(v) for k, v in th.values.items()},
                 "columns": ["q1", "p1", "q2", "p2", "u", "t"], "path": enc}


def _cmd_residual(cfg):
    tols = cfg.tolerances
    draws = cfg.draws or 20
    names = [get_variant(cfg.system).name] if cfg.system else list(LAX_CATALOG)
    bad = [n for n in names if n not in LAX_CATALOG]
    if bad:
        raise ConfigError(f"no Lax pair for {bad[0]!r}")
    tol = tols.get("isomonodromy", checks.DEFAULT_TOLERANCES["isomonodromy"])
    rng = np.random.default_rng(cfg.seed)
    out = []
    for n in names:
        worst = max(checks._residuals(n, rng, draws, 10, False, cfg.seed))
        out.append(checks.CheckResult("isomonodromy", n, worst <= tol, worst, tol, {"draws": draws}))
    return out, {}


def _cmd_spectral_type(cfg):
    from .htl import classify_system
    from .lax import build_lax, riemann_scheme_of

    var = _variant(cfg, "(2)_2,(11)_2")
    if var.name not in LAX_CATALOG:
        raise ConfigError(f"no Lax pair for {var.name!r}")
    rng = np.random.default_rng(cfg.seed)
    th = random_theta(var.name, rng)
    s = checks.random_state(rng)
    c = classify_system(build_lax(var.system, var.name, th, s).A)
    scheme = riemann_scheme_of(var.name, th, s.t)
    res = [checks.CheckResult("spectral_type", var.name, c.spectral_type.text == var.name, c.spectral_type.text,
                              var.name, {"pattern": c.pattern})]
    return res, {"pattern": c.pattern, "spectral_type": c.spectral_type.text,
                 "riemann_scheme": json.loads(scheme.to_json()), "riemann_scheme_text": scheme.to_text()}


def _cmd_riemann_scheme(cfg):
    from .lax import riemann_scheme_of

    var = _variant(cfg, "(2)_2,(11)_2")
    rng = np.random.default_rng(cfg.seed)
    th = random_theta(var.name, rng)
    t = checks.random_state(rng).t
    scheme = riemann_scheme_of(var.name, th, t)
    total = abs(scheme.residue_sum())
    tol = cfg.tolerances.get("fuchs", checks.DEFAULT_TOLERANCES["fuchs"])
    res = [checks.CheckResult("fuchs", var.name, total <= tol, float(total), tol)]
    return res, {"theta": {k: _c(v) for k, v in th.values.items()}, "t": _c(t),
                 "riemann_scheme": json.loads(scheme.to_json()), "riemann_scheme_text": scheme.to_text()}


def _cmd_degenerate(cfg):
    rules = [dg.get_rule(cfg.rule)] if cfg.rule else dg.rule_catalog()
    if cfg.system:
        name = get_variant(cfg.system).name
        rules = [r for r in rules if name in (get_variant(r.source).name, get_variant(r.target).name)]
    thr = cfg.tolerances.get("slope", dg.SLOPE_THRESHOLD)
    draws = cfg.draws or 5
    out, reports = [], []
    for r in rules:
        grid = r.grid if cfg.eps_grid is None or r.grid == dg.REDUCED_GRID else cfg.eps_grid
        for rep in (dg.verify_flow_limit(r, grid, draws, cfg.seed, threshold=thr),
                    dg.verify_hamiltonian_relation(r, grid, draws, cfg.seed, threshold=thr)):
            reports.append(rep)
            out.append(checks.CheckResult("degeneration", f"{rep.kind}: {rep.rule}", rep.passed, rep.slope, thr,
                                          {"grid": list(rep.grid), "residuals": rep.residuals, **rep.details}))
    if not cfg.rule and not cfg.system:
        demo = dg.linear_degeneration_demo(cfg.eps_grid or dg.DEFAULT_GRID, seed=cfg.seed)
        reports.append(demo)
        out.append(checks.CheckResult("degeneration", demo.rule, demo.passed, demo.slope, thr,
                                      {"residuals": demo.residuals, **demo.details}))
    return out, {"summary_csv": dg.reports_csv(reports)}


def _cmd_laplace(cfg):
    return checks.laplace_suite(seed=cfg.seed, tols=cfg.tolerances), {}


def _cmd_verify_all(cfg):
    return checks.run_all(seed=cfg.seed, tols=cfg.tolerances, eps_grid=cfg.eps_grid), {}


_HANDLERS = {
    "list-systems": _cmd_list_systems,
    "integrate": _cmd_integrate,
    "residual": _cmd_residual,
    "spectral-type": _cmd_spectral_type,
    "riemann-scheme": _cmd_riemann_scheme,
    "degenerate": _cmd_degenerate,
    "laplace": _cmd_laplace,
    "verify-all": _cmd_verify_all,
}


# ---------------------------------------------------------------------------
# formatting


def _c(z):
    z = complex(z)
    return [z.real, z.imag]


def _json_default(o):
    if isinstance(o, complex):
        return _c(o)
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _finite(o):
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, dict):
        return {k: _finite(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_finite(v) for v in o]
    return o


def render(cfg: RunConfig, results: list, payload: dict) -> str:
    passed = all(r.passed for r in results)
    if cfg.format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": cfg.command, "seed": cfg.seed,
               "system": cfg.system, "passed": passed, "results": [r.to_dict() for r in results], **payload}
        return json.dumps(_finite(doc), sort_keys=True, indent=1, default=_json_default) + "\n"
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "name", "passed", "value", "tolerance"])
        for r in results:
            w.writerow([r.suite, r.name, r.passed, _cell(r.value), _cell(r.tolerance)])
        return buf.getvalue()
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.suite:16s} {r.name}  value={_cell(r.value)}"
                     f"  tol={_cell(r.tolerance)}")
    for key in ("riemann_scheme_text", "degeneration_dot", "summary_csv"):
        if key in payload:
            lines.append("")
            lines.append(payload[key].rstrip("\n"))
    lines.append(f"overall: {'PASS' if passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def _cell(v):
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.6g}"
    return "" if v is None else str(v)


# ---------------------------------------------------------------------------
# entry points


def run(cfg: RunConfig) -> int:
    """Execute one configuration; returns the exit code."""
    try:
        cfg.validate()
        results, payload = _HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = render(cfg, results, payload)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r.passed for r in results) else 1


def _parse_tol(items):
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects key=value, got {item!r}")
        try:
            out[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"--tol value for {key!r} is not a number") from exc
    return out


def _parse_grid(text):
    if text is None:
        return None
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"--eps-grid must be comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="matpainleve", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--system", help="variant named by its spectral type, or a system id such as MatII")
    p.add_argument("--rule", help="degeneration rule 'source -> target' (degenerate only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps-grid", help="comma-separated decreasing eps values in (0, 0.5]")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--draws", type=int, help="random draws per check")
    p.add_argument("--tol", action="append", metavar="KEY=VALUE",
                   help=f"override a tolerance; keys: {', '.join(checks.DEFAULT_TOLERANCES)}")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--output", help="write the report to this file")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.seed, _parse_tol(args.tol), args.output, args.format, args.system,
                        _parse_grid(args.eps_grid), args.steps, args.rule, args.draws)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
