"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import json
import subprocess
import sys
import time

import pytest

from conftest import ACCEPTANCE_LINES
from limitres.catalog import catalog_file
from limitres.selftest import CRITERIA, run_criterion


def report(number, passed, detail, elapsed=None, limit=None):
    title = CRITERIA[number - 1][1]
    timing = "" if elapsed is None else f" [{elapsed:.2f}s" + (f" < {limit:g}s" if limit else "") + "]"
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}: {detail}{timing}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def cli(*argv):
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "limitres", *map(str, argv)],
                          capture_output=True, text=True, check=False)
    return proc, time.perf_counter() - start


def test_criterion_1_exp_log_kernel():
    r = run_criterion(1)
    d = r.details
    ok = (r.passed and d["matrices"] == 1000 and d["max_roundtrip_error"] < 1e-9
          and d["max_series_error"] < 1e-10 and r.elapsed < 5)
    assert report(1, ok, f"round trip {d['max_roundtrip_error']:.1e}, series {d['max_series_error']:.1e}",
                  r.elapsed, 5)


def test_criterion_2_jacobian_oracle():
    r = run_criterion(2)
    d = r.details
    ok = r.passed and d["points"] == 50 and d["max_relative_error"] < 1e-5 and r.elapsed < 30
    assert report(2, ok, f"{d['points']} points, max relative error {d['max_relative_error']:.1e}",
                  r.elapsed, 30)


def test_criterion_3_dimension_anchors():
    r = run_criterion(3)
    d = r.details
    ok = (r.passed and all(d["free"][f"F{n}"] == 3 * n for n in range(1, 6))
          and d["z2"] == [4] * 20 and d["z2_oracle"] == [4] * 20)
    assert report(3, ok, f"free {list(d['free'].values())}, Z2 {sorted(set(d['z2']))} x{len(d['z2'])}")


def test_criterion_4_twist_flow_membership():
    r = run_criterion(4)
    fx = r.details["fixtures"]
    ok = r.passed and all(
        v["samples"] >= 100 and v["max_residual"] < 1e-9
        and v["endpoint_zero"] < 1e-10 and v["endpoint_one"] < 1e-10 for v in fx.values())
    worst = max(v["max_residual"] for v in fx.values())
    ends = max(max(v["endpoint_zero"], v["endpoint_one"]) for v in fx.values())
    assert report(4, ok, f"{len(fx)} fixtures, residual {worst:.1e}, endpoints {ends:.1e}")


def test_criterion_5_diagram_commutes():
    r = run_criterion(5)
    d = r.details
    worst = max(d["max_residuals"].values())
    ok = r.passed and worst < 1e-8 and d["corrupted_residual"] > 1e-3
    assert report(5, ok, f"{len(d['max_residuals'])} lifts, residual {worst:.1e}, "
                         f"corrupted {d['corrupted_residual']:.1e}")


@pytest.mark.parametrize("name,dims", [("f2-z2-z.json", [6, 4, 3]), ("f3-z3-z2-z.json", [9, 5, 4, 3])])
def test_criterion_6_resolution_bound(name, dims):
    proc, elapsed = cli("verify-resolution", catalog_file("resolutions", name), "--seed", 7)
    data = json.loads(proc.stdout) if proc.stdout else {}
    b = data.get("bound", {})
    ok = (proc.returncode == 0 and data.get("dimensions") == dims
          and all(data.get("strict_decrease", [False])) and b.get("k", 99) <= b.get("three_n_minus_m", -1)
          and elapsed < 60)
    assert report(6, ok, f"{name} dims {data.get('dimensions')} k={b.get('k')} <= {b.get('three_n_minus_m')}, "
                         f"exit {proc.returncode}", elapsed, 60)


@pytest.mark.parametrize("name", sorted(p.name for p in catalog_file("corrupt").glob("*.json")
                                        if "adversarial" not in p.name))
def test_criterion_6_corrupted_fixtures(name):
    proc, elapsed = cli("verify-resolution", catalog_file("corrupt", name), "--seed", 7)
    ok = proc.returncode == 1 and elapsed < 60
    assert report(6, ok, f"corrupted {name} exit {proc.returncode}", elapsed, 60)


def test_criterion_7_lattice_bound():
    r = run_criterion(7)
    d = r.details
    ok = r.passed and all(v["passed"] for v in d["shipped"].values()) and d["adversarial"]["flagged"]
    heights = {k: (v["height"], 3 * v["rank"]) for k, v in d["shipped"].items()}
    assert report(7, ok, f"height/bound {heights}, adversarial height {d['adversarial']['height']} flagged")


def test_criterion_8_determinism():
    first, t1 = cli("selftest", "--seed", 7)
    second, t2 = cli("selftest", "--seed", 7)
    ok = first.returncode == 0 and first.stdout == second.stdout and json.loads(first.stdout)["passed"]
    assert report(8, ok, f"selftest --seed 7 twice, {len(first.stdout)} bytes identical={first.stdout == second.stdout}",
                  t1 + t2)
