"""The acceptance criteria as callable checks with JSON-ready results."""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import flows, oracles, repvar, sl2c, splittings
from .catalog import catalog_file, catalog_groups, catalog_splittings, load_splitting_file
from .errors import CentralizerError
from .lattice import check_bound, parse_lattice
from .resolution import load_resolution, verify_resolution
from .splittings import HNN
from .words import GroupMap, Word

POSITIVE_RESOLUTIONS = ("f2-z2-z.json", "f3-z3-z2-z.json")
FLOW_FIXTURES = ("z2-hnn", "genus2-amalgam")


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict
    elapsed: float = field(default=0.0, compare=False)
    limit: float | None = None

    @property
    def within_time(self) -> bool:
        return self.limit is None or self.elapsed < self.limit

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        t = f"{self.elapsed:.2f}s" + (f" (limit {self.limit:g}s)" if self.limit else "")
        return f"[{status}] criterion {self.number}: {self.title} [{t}]"

    def to_json(self) -> dict:
        # elapsed time is left out so reports are reproducible byte for byte
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "details": self.details}


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng([seed, 100 + tag])


def exp_log_kernel(seed: int) -> dict:
    rng = _rng(seed, 1)
    worst_round = worst_series = 0.0
    count = 0
    while count < 1000:
        if count % 10 == 9:
            # near the trace -2 wall: -exp(small)
            g = -sl2c.exp_mat(sl2c.random_traceless(rng, 0.2))
        else:
            g = sl2c.sample_sl2(rng)
        if sl2c.trace_defect(g) <= 1e-3:
            continue
        v = sl2c.log_mat(g)
        e = sl2c.exp_mat(v)
        worst_round = max(worst_round, sl2c.frob(e - g))
        worst_series = max(worst_series, sl2c.frob(e - oracles.exp_series(v)) / sl2c.scale(e))
        count += 1
    return {"passed": worst_round < 1e-9 and worst_series < 1e-10, "matrices": count,
            "max_roundtrip_error": worst_round, "max_series_error": worst_series}


def _jacobian_points(seed: int) -> list[repvar.Representation]:
    rng = _rng(seed, 2)
    groups = catalog_groups()
    pres = [groups[f"F{n}"] for n in range(1, 6)]
    pres += [groups[f"Z{n}"] for n in range(2, 6) for _ in range(5)]
    pres.append(groups["S2"])
    for name, fixture in catalog_splittings().items():
        pres += [fixture.splitting.assembled] * (10 if name in FLOW_FIXTURES else 2)
    return [repvar.sample_on_variety(p, rng) for p in pres]


def jacobian_oracle(seed: int) -> dict:
    worst = 0.0
    points = _jacobian_points(seed)
    for p in points:
        jac = repvar.relator_jacobian(p)
        fd = oracles.fd_jacobian([r.letters for r in p.presentation.relators], p.matrices)
        if jac.size:
            worst = max(worst, float(np.linalg.norm(jac - fd) / max(1.0, np.linalg.norm(jac))))
    return {"passed": worst < 1e-5 and len(points) == 50, "points": len(points),
            "max_relative_error": worst}


def dimension_anchors(seed: int) -> dict:
    rng = _rng(seed, 3)
    groups = catalog_groups()
    free = {}
    for n in range(1, 6):
        p = repvar.Representation(groups[f"F{n}"], tuple(sl2c.sample_sl2(rng) for _ in range(n)))
        est = repvar.local_dimension(p)
        free[f"F{n}"] = est.local_dim
    z2 = groups["Z2"]
    dims, fd_dims, trusted = [], [], []
    for _ in range(20):
        p = repvar.sample_on_variety(z2, rng)
        est = repvar.local_dimension(p)
        dims.append(est.local_dim)
        trusted.append(est.trusted)
        fd_dims.append(oracles.fd_local_dimension([r.letters for r in z2.relators], p.matrices))
    ok = (all(free[f"F{n}"] == 3 * n for n in range(1, 6)) and dims == [4] * 20
          and fd_dims == [4] * 20 and all(trusted))
    return {"passed": ok, "free": free, "z2": dims, "z2_oracle": fd_dims,
            "z2_trusted": all(trusted)}


def twist_flow_membership(seed: int, bases: int = 3) -> dict:
    out = {}
    ok = True
    for name in FLOW_FIXTURES:
        fixture = catalog_splittings()[name]
        rng = _rng(seed, 4)
        lift = splittings.lift(fixture.splitting, fixture.twist, rng=rng)
        worst = end0 = end1 = 0.0
        samples = 0
        for _ in range(bases):
            base = repvar.sample_on_variety(fixture.splitting.assembled, rng)
            fam = flows.make_family(lift, base, rng=rng)
            rep = flows.verify_flow(fam, rng=rng)
            r0, r1 = flows.endpoint_residuals(fam)
            worst = max(worst, rep.max_residual)
            end0, end1 = max(end0, r0), max(end1, r1)
            samples += len(rep.rows)
        passed = worst < 1e-9 and end0 < 1e-10 and end1 < 1e-10
        ok &= passed
        out[name] = {"passed": passed, "samples": samples, "max_residual": worst,
                     "endpoint_zero": end0, "endpoint_one": end1}
    return {"passed": ok, "fixtures": out}


def corrupt_lift(lift: splittings.LiftData) -> splittings.LiftData:
    """Replace the lifted twist of an HNN lift by ``t -> t e^2``."""
    s = lift.splitting
    if s.kind != HNN:
        raise ValueError("the corrupted control is built from an HNN lift")
    images = list(lift.lifted_twist.images)
    t = Word.generator(s.assembled.rank, s.stable_index)
    images[s.stable_index] = t * lift.lifted_edge_element ** 2
    bad = GroupMap(lift.lifted_group, lift.lifted_group, tuple(images))
    return dataclasses.replace(lift, lifted_twist=bad)


def diagram_commutes(seed: int) -> dict:
    out = {}
    ok = True
    for name, fixture in catalog_splittings().items():
        rng = _rng(seed, 5)
        lift = splittings.lift(fixture.splitting, fixture.twist, rng=rng)
        reps = [repvar.sample_on_variety(fixture.splitting.assembled, rng) for _ in range(20)]
        rep = splittings.check_diagram(lift, reps, tol=1e-8)
        ok &= rep.passed
        out[name] = rep.max_residual
    rng = _rng(seed, 6)
    fixture = catalog_splittings()["z2-hnn"]
    bad = corrupt_lift(splittings.lift(fixture.splitting, fixture.twist, rng=rng))
    reps = [repvar.sample_on_variety(fixture.splitting.assembled, rng) for _ in range(20)]
    neg = splittings.check_diagram(bad, reps, tol=1e-8).max_residual
    noncentral = load_splitting_file(catalog_file("corrupt", "genus2-noncentral.split"))[0]
    try:
        splittings.lift(noncentral.splitting, noncentral.twist, rng=rng)
        rejected = False
    except CentralizerError:
        rejected = True
    return {"passed": ok and neg > 1e-3 and rejected, "max_residuals": out,
            "corrupted_residual": neg, "noncentral_twist_rejected": rejected}


def _resolution_reports(seed: int) -> dict[str, str]:
    out = {}
    for name in POSITIVE_RESOLUTIONS:
        out[name] = verify_resolution(load_resolution(catalog_file("resolutions", name)), seed).dumps()
    for path in sorted(catalog_file("corrupt").glob("*.json")):
        if "adversarial" not in path.name:
            out[path.name] = verify_resolution(load_resolution(path), seed).dumps()
    return out


def resolution_bound(seed: int) -> dict:
    reports = {k: json.loads(v) for k, v in _resolution_reports(seed).items()}
    positive = {k: reports[k] for k in POSITIVE_RESOLUTIONS}
    negative = {k: v for k, v in reports.items() if k not in POSITIVE_RESOLUTIONS}
    ok = all(r["passed"] for r in positive.values()) and not any(r["passed"] for r in negative.values())
    return {
        "passed": ok,
        "positive": {k: {"dimensions": r["dimensions"], "strict_decrease": r["strict_decrease"],
                         "k": r["bound"]["k"], "bound": r["bound"]["three_n_minus_m"],
                         "exit": 0 if r["passed"] else 1} for k, r in positive.items()},
        "negative": {k: {"exit": 0 if r["passed"] else 1,
                         "statuses": [m["status"] for m in r["certification"]["maps"]]}
                     for k, r in negative.items()},
    }


def lattice_bound(seed: int) -> dict:
    shipped = {}
    for p in sorted(catalog_file("lattices").iterdir()):
        rep = check_bound(parse_lattice(p.read_text()))
        shipped[p.name] = {"height": rep.height, "rank": rep.rank, "passed": rep.passed}
    adv = check_bound(parse_lattice(catalog_file("corrupt", "adversarial-height7.json").read_text()))
    ok = all(v["passed"] for v in shipped.values()) and not adv.passed
    return {"passed": ok, "shipped": shipped,
            "adversarial": {"height": adv.height, "rank": adv.rank, "flagged": not adv.passed}}


def _flow_report_bytes(seed: int) -> str:
    fixture = catalog_splittings()["z2-hnn"]
    rng = _rng(seed, 8)
    lift = splittings.lift(fixture.splitting, fixture.twist, rng=rng)
    base = repvar.sample_on_variety(fixture.splitting.assembled, rng)
    rep = flows.verify_flow(flows.make_family(lift, base, rng=rng), rng=rng)
    return json.dumps(rep.to_json(), sort_keys=True)


def determinism(seed: int) -> dict:
    first = (_resolution_reports(seed), _flow_report_bytes(seed))
    second = (_resolution_reports(seed), _flow_report_bytes(seed))
    return {"passed": first == second, "compared_reports": len(first[0]) + 1}


CRITERIA: list[tuple[int, str, Callable[[int], dict], float | None]] = [
    (1, "exp/log kernel round trip and series agreement", exp_log_kernel, 5.0),
    (2, "Fox Jacobian matches finite differences", jacobian_oracle, 30.0),
    (3, "dimension anchors for F1..F5 and Z2", dimension_anchors, None),
    (4, "twist families stay on the variety", twist_flow_membership, None),
    (5, "lift diagram commutes; corrupted lift detected", diagram_commutes, None),
    (6, "resolution bound on catalog chains; corrupted fixtures rejected", resolution_bound, 60.0),
    (7, "lattice heights within 3*rank; adversarial tree flagged", lattice_bound, None),
    (8, "pipelines are deterministic", determinism, None),
]


def run_criterion(number: int, seed: int = 7) -> CriterionResult:
    num, title, fn, limit = CRITERIA[number - 1]
    start = time.perf_counter()
    details = fn(seed)
    elapsed = time.perf_counter() - start
    return CriterionResult(num, title, bool(details.pop("passed")), details, elapsed, limit)


def run_selftest(seed: int = 7, only: list[int] | None = None) -> list[CriterionResult]:
    numbers = only or [c[0] for c in CRITERIA]
    return [run_criterion(n, seed) for n in numbers]


def selftest_json(results: list[CriterionResult], seed: int) -> str:
    data = {
        "schema_version": 1,
        "seed": seed,
        "criteria": [r.to_json() for r in results],
        "passed": all(r.passed for r in results),
    }
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"
