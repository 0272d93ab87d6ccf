"""Batch verification runner: ``python -m equiloc --scenario NAME --suite SUITE``."""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import inspect
import json
import sys
from dataclasses import dataclass, field

from . import scenarios, suites
from .errors import EquilocError, ScenarioError
from .scenarios import SCHEMA

SUITE_CHOICES = suites.SUITES + ("all",)


@dataclass
class RunSpec:
    scenario: str = None
    suite: str = "all"
    config: str = None
    s: tuple = None
    t: float = None
    tol: float = None
    nodes: int = None
    seed: int = 0
    out: str = None
    params: dict = field(default_factory=dict)


def _t_param(name):
    """Parameter that ``--t`` drives for a built-in scenario."""
    sig = inspect.signature(scenarios.CATALOG[name]).parameters
    for key in ("t", "t1"):
        if key in sig:
            return key
    return None


def load(spec):
    """Build the scenario a RunSpec names, applying parameter overrides."""
    params = dict(spec.params)
    if spec.config:
        with open(spec.config) as fh:
            cfg = json.load(fh)
        if spec.t is not None:
            params["t"] = spec.t
        if params:
            cfg.setdefault("params", {}).update(params)
    else:
        if spec.scenario not in scenarios.CATALOG:
            raise ScenarioError(f"scenario-not-found: {spec.scenario!r}")
        if spec.t is not None:
            key = _t_param(spec.scenario)
            if key is None:
                raise ScenarioError(f"scenario {spec.scenario} has no time parameter")
            params[key] = spec.t
        cfg = scenarios.builtin_config(spec.scenario, **params)
    if spec.nodes is not None:
        cfg.setdefault("quadrature", {})["base_nodes"] = int(spec.nodes)
    return scenarios.from_config(cfg)


def options(spec):
    opts = suites.Options(seed=spec.seed)
    if spec.s is not None:
        opts.s_grid = tuple(spec.s)
    if spec.tol is not None:
        opts.tol_integral = spec.tol
    return opts


def run(spec):
    """Execute the suites; returns ``(exit_status, report)``."""
    report = {
        "schema_version": SCHEMA,
        "scenario": spec.config or spec.scenario,
        "suite": spec.suite,
        "seed": spec.seed,
        "run_spec": {k: v for k, v in dataclasses.asdict(spec).items() if k != "out"},
        "checks": [],
        "timings": {},
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    try:
        if spec.suite not in SUITE_CHOICES:
            raise ScenarioError(f"suite-not-found: {spec.suite!r}")
        scen = load(spec)
        report["scenario"] = scen.name
        report["params"] = scen.params
        checks, timings = suites.run_suites(scen, spec.suite, options(spec))
        report["checks"] = [c.to_dict() for c in checks]
        report["timings"] = timings
    except EquilocError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return 2, report
    failed = [c for c in report["checks"] if c["status"] in ("fail", "error")]
    report["summary"] = {
        "passed": sum(c["status"] == "pass" for c in report["checks"]),
        "failed": len(failed),
        "skipped": sum(c["status"] == "skipped" for c in report["checks"]),
    }
    return (1 if failed else 0), report


def dumps(report):
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True)


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _param(text):
    key, _, value = text.partition("=")
    if not value:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), float(value)


def parser():
    p = argparse.ArgumentParser(prog="equiloc", description=__doc__)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--scenario", help="built-in scenario name")
    src.add_argument("--config", help="path to a JSON scenario config")
    p.add_argument("--suite", default="all", help=f"one of {', '.join(SUITE_CHOICES)}")
    p.add_argument("--s", type=_floats, help="comma-separated deformation parameters")
    p.add_argument("--t", type=float, help="time parameter of the scenario")
    p.add_argument("--param", type=_param, action="append", default=[],
                   help="scenario parameter override key=value (repeatable)")
    p.add_argument("--tol", type=float, help="relative tolerance for integral checks")
    p.add_argument("--nodes", type=int, help="initial Gauss-Legendre nodes per axis")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--list-scenarios", action="store_true")
    return p


def main(argv=None):
    args = parser().parse_args(argv)
    if args.list_scenarios:
        for name, fn in scenarios.CATALOG.items():
            print(f"{name}\t{(inspect.getdoc(fn) or '').splitlines()[0] if fn.__doc__ else ''}")
        return 0
    if not (args.scenario or args.config):
        parser().error("one of --scenario or --config is required")
    spec = RunSpec(args.scenario, args.suite, args.config, args.s, args.t, args.tol, args.nodes,
                   args.seed, args.out, dict(args.param))
    status, report = run(spec)
    text = dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if "error" in report:
        print(f"error: {report['error']['message']}", file=sys.stderr)
    else:
        s = report["summary"]
        print(f"{report['scenario']} [{report['suite']}]: {s['passed']} passed, {s['failed']} failed, "
              f"{s['skipped']} skipped", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
