"""Command-line entry point: ``limitres <subcommand> ...``.

Exit status 0 means every check passed, 1 a check failed, 2 the input could
not be read.  Reports are JSON on standard output (or ``--out``);
diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import flows, repvar, sl2c, splittings
from .catalog import load_group_file, load_splitting_file
from .errors import CertificationError, DegenerateElementError, LatticeError, ParseError
from .lattice import check_bound, parse_lattice
from .resolution import load_resolution, verify_resolution
from .selftest import CRITERIA, run_selftest, selftest_json
from .textformat import parse_word

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _dump(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def cmd_check_twist(args) -> tuple[dict, bool]:
    _read(args.splitting_file)
    entries = load_splitting_file(args.splitting_file)
    results, ok = [], True
    for k, stanza in enumerate(entries):
        s = stanza.splitting
        twist = stanza.twist
        if args.twist is not None:
            twist = parse_word(args.twist, s.twist_side.names)
        if twist is None:
            raise InputError(f"split stanza on line {stanza.line} names no twist= element")
        rng = np.random.default_rng([args.seed, k])
        entry = {"splitting": s.assembled.label, "kind": s.kind, "line": stanza.line,
                 "twist": s.twist_side.format(twist)}
        try:
            lift = splittings.lift(s, twist, samples=args.seeds, rng=rng)
        except CertificationError as exc:
            entry.update(passed=False, error=str(exc))
            results.append(entry)
            ok = False
            continue
        reps = [repvar.sample_on_variety(s.assembled, rng) for _ in range(args.seeds)]
        diagram = splittings.check_diagram(lift, reps, tol=args.diagram_tol)
        worst = dict.fromkeys(("max_relator_residual", "max_edge_residual",
                               "max_unimodularity_residual", "max_centralizer_residual"), 0.0)
        end0 = end1 = 0.0
        samples = degenerate = 0
        for base in reps:
            try:
                fam = flows.make_family(lift, base, delta=args.delta, rng=rng)
            except DegenerateElementError:
                degenerate += 1
                continue
            rep = flows.verify_flow(fam, tol=args.tol, rng=rng)
            summary = rep.summary()
            for key in worst:
                worst[key] = max(worst[key], summary[key])
            r0, r1 = flows.endpoint_residuals(fam)
            end0, end1 = max(end0, r0), max(end1, r1)
            samples += len(rep.rows)
        flow_ok = (degenerate == 0 and worst["max_relator_residual"] <= args.tol
                   and worst["max_edge_residual"] <= args.tol and end0 <= 1e-10 and end1 <= 1e-10)
        passed = diagram.passed and flow_ok
        ok &= passed
        entry.update(
            diagram=diagram.to_json(),
            flow={**worst, "samples": samples, "bases": len(reps), "degenerate_bases": degenerate,
                  "endpoint_zero": end0, "endpoint_one": end1, "tol": args.tol},
            passed=passed,
        )
        results.append(entry)
    return {"schema_version": 1, "seed": args.seed, "splittings": results, "passed": ok}, ok


def cmd_estimate_dim(args) -> tuple[dict, bool]:
    pres = load_group_file(args.group_file)
    rng = np.random.default_rng([args.seed])
    estimates = []
    for _ in range(args.samples):
        estimates.append(repvar.local_dimension(repvar.sample_on_variety(pres, rng), args.rank_tol))
    trusted = [e for e in estimates if e.trusted]
    dim = max((e.local_dim for e in trusted), default=None)
    report = {
        "schema_version": 1,
        "group": pres.label,
        "rank": pres.rank,
        "seed": args.seed,
        "dimension": dim,
        "trusted_samples": len(trusted),
        "samples": len(estimates),
        "estimates": [e.to_json() for e in estimates],
    }
    return report, dim is not None


def cmd_verify_resolution(args) -> tuple[dict, bool]:
    _read(args.resolution)
    d = load_resolution(args.resolution)
    report = verify_resolution(d, args.seed, args.samples, delta=args.delta)
    return report.to_json(), report.passed


def cmd_lattice_height(args) -> tuple[dict, bool]:
    lat = parse_lattice(_read(args.lattice))
    rep = check_bound(lat, args.resolution_length, args.rank)
    return {"schema_version": 1, **rep.to_json()}, rep.passed


def cmd_selftest(args) -> tuple[dict, bool]:
    results = run_selftest(args.seed, args.only)
    for r in results:
        print(r.line(), file=sys.stderr)
    text = selftest_json(results, args.seed)
    return json.loads(text), all(r.passed for r in results)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="limitres", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-twist", parents=[common],
                       help="build the lift, check the diagram and the twist family")
    p.add_argument("splitting_file")
    p.add_argument("--seeds", type=int, default=20, help="sampled base points (default 20)")
    p.add_argument("--tol", type=float, default=1e-9, help="flow residual tolerance")
    p.add_argument("--diagram-tol", type=float, default=1e-8)
    p.add_argument("--twist", help="twisting element, overriding the stanza's twist=")
    p.add_argument("--delta", type=float, default=sl2c.DEFAULT_DELTA,
                   help="distance kept from the trace -2 wall")
    p.set_defaults(func=cmd_check_twist)

    p = sub.add_parser("estimate-dim", parents=[common], help="local dimension of R(G)")
    p.add_argument("group_file", help="a one-group text file or a catalog group name")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--rank-tol", type=float, default=repvar.DEFAULT_RANK_TOL)
    p.set_defaults(func=cmd_estimate_dim)

    p = sub.add_parser("verify-resolution", parents=[common],
                       help="certify a resolution and check the length bound")
    p.add_argument("resolution")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--delta", type=float, default=sl2c.DEFAULT_DELTA,
                   help="nondegeneracy threshold for terminus samples")
    p.set_defaults(func=cmd_verify_resolution)

    p = sub.add_parser("lattice-height", parents=[common], help="height of an analysis lattice")
    p.add_argument("lattice")
    p.add_argument("--rank", type=int, help="rank of the root group (overrides the document)")
    p.add_argument("--resolution-length", type=int)
    p.set_defaults(func=cmd_lattice_height)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    p.add_argument("--only", type=int, action="append", choices=[c[0] for c in CRITERIA],
                   help="run just this criterion (repeatable)")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, ok = args.func(args)
    except (InputError, ParseError, LatticeError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"limitres: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except CertificationError as exc:
        print(f"limitres: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(_dump(report), args.out)
    if not ok:
        print(f"limitres: {args.command}: checks failed", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
