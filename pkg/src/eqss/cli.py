"""Command line front end: `eqss run <scenario>` and `eqss explain <scenario>`."""

from __future__ import annotations

import argparse
import sys
import time

from .errors import (
    EqssError,
    ResourceLimit,
    ScenarioParseError,
    ScenarioValidationError,
)
from .report import render_json, render_text, run_tasks
from .scenario import Scenario, parse_scenario_file

EXIT_OK = 0
EXIT_FALSE_VERDICT = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_RESOURCE = 4
EXIT_COMPUTE = 5


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="eqss",
        description="Exact spectral-sequence computations for finite group actions "
                    "on finite simplicial complexes.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario's tasks and write a report")
    run.add_argument("scenario", help="path to a scenario TOML file")
    run.add_argument("--out", help="write the JSON report here (default: stdout only)")
    run.add_argument("--max-page", type=int, default=2,
                     help="highest page to compute for the swan_pages task")
    run.add_argument("--seed", type=int, default=0,
                     help="seed for randomized property-demo tasks")
    exp = sub.add_parser("explain", help="print size estimates without computing cohomology")
    exp.add_argument("scenario", help="path to a scenario TOML file")
    return ap


def _explain(sc: Scenario, out) -> None:
    swan = sc.swan
    G = sc.group
    print(f"scenario {sc.label}", file=out)
    print(f"  ring: {sc.ring_name}   group order: {G.order}   "
          f"resolution: {swan.resolution_kind}", file=out)
    if swan.resolution_kind == "bar":
        rg = [(G.order - 1) ** p for p in range(swan.p_max + 1)]
    else:
        rg = [1] * (swan.p_max + 1)
    print(f"  resolution RG-ranks by degree: {rg}", file=out)
    m = swan.coefficients.ngens
    cr = [len(swan.space.simplices_of_dim(q)) * m for q in range(swan.q_max + 1)]
    print(f"  cochain ranks C^0..C^{swan.q_max}: {cr}", file=out)
    cells = {(p, q): rg[p] * cr[q] for p in range(swan.p_max + 1)
             for q in range(swan.q_max + 1)}
    print(f"  largest double-complex cell: {max(cells.values()) if cells else 0}", file=out)
    tot = [sum(cells.get((p, n - p), 0) for p in range(n + 1))
           for n in range(swan.p_max + swan.q_max + 1)]
    print(f"  total complex ranks by degree: {tot}", file=out)
    if "borel" in sc.tasks or "compare" in sc.tasks:
        from .borel import ordered_levels

        x_levels, _ = ordered_levels(swan.space, sc.borel_n_max)
        eg = [G.order ** (n + 1) for n in range(sc.borel_n_max + 1)]
        orbits = [len(x) * e // G.order for x, e in zip(x_levels, eg)]
        print(f"  Borel quotient level sizes (orbits): {orbits}", file=out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = parse_scenario_file(args.scenario)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.command == "explain":
        try:
            _explain(sc, sys.stdout)
        except EqssError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_COMPUTE
        return EXIT_OK

    t0 = time.monotonic()
    try:
        report = run_tasks(sc, max_page=args.max_page, seed=args.seed)
    except ScenarioValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except EqssError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    elapsed = time.monotonic() - t0

    payload = render_json(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    sys.stdout.write(render_text(report))
    print(f"elapsed: {elapsed:.2f}s", file=sys.stderr)
    return EXIT_OK if report["all_verdicts_true"] else EXIT_FALSE_VERDICT


if __name__ == "__main__":
    sys.exit(main())
