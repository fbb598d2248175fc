#!/usr/bin/env python3
"""Smoke test for the wardmip_py extension module.

Build the module first, then run this script:

    cargo build --release -p wardmip-py
    python3 python/smoke_test.py

The script copies the built shared library next to itself under the
importable name, imports it, and walks the main surface end to end:
solve, validate, render, parse, round-trip, export.
"""

import pathlib
import shutil
import sys

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def stage_module() -> None:
    candidates = [
        ROOT / "target" / "release" / "libwardmip_py.so",
        ROOT / "target" / "debug" / "libwardmip_py.so",
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit(
            "libwardmip_py.so not found — run `cargo build --release -p wardmip-py` first"
        )
    newest = max(built, key=lambda p: p.stat().st_mtime)
    staged = HERE / "wardmip_py.so"
    if not staged.exists() or staged.stat().st_mtime < newest.stat().st_mtime:
        shutil.copy2(newest, staged)
    sys.path.insert(0, str(HERE))


stage_module()
import wardmip_py as wm  # noqa: E402

checks = 0


def ok(label: str) -> None:
    global checks
    checks += 1
    print(f"ok {checks:2d} - {label}")


# --- solve a built-in ward and validate the outcome ----------------------
li = wm.builtin_li2003(0)
assert li.nurse_count == 27 and li.horizon == 7 and li.shift_labels == ["AM", "PM", "MN"]
outcome = li.solve()
assert outcome.status == "optimal" and outcome.roster is not None
assert abs(outcome.objective - outcome.bound) <= 1e-6
ok(f"li ward solves to proven optimum {outcome.objective}")

report = li.validate(outcome.roster)
assert report.feasible and report.violations == []
assert abs(report.objective - outcome.objective) <= 1e-6
ok("independent validator confirms the roster and the objective")

stats = li.fairness(outcome.roster)
assert len(stats["worked"]) == 27 and max(stats["worked"]) <= 5
ok(f"fairness: worked spread {stats['worked_spread']}, mean {stats['worked_mean']:.2f}")

# --- rendering and CSV round trip -----------------------------------------
grid = li.render(outcome.roster)
assert len(grid.splitlines()) == 29  # header + rule + one line per nurse
csv_text = li.render(outcome.roster, format="csv")
parsed = li.parse_csv(csv_text)
assert li.render(parsed, format="csv") == csv_text
ok("grid renders; CSV round-trips through the parser")

# --- instance document round trip ------------------------------------------
text = li.write()
again = wm.read_instance(text)
assert again.write() == text
ok("canonical document round-trips byte-identically")

# --- MPS export -------------------------------------------------------------
mps = li.mps()
assert mps.startswith("NAME") and mps.endswith("ENDATA\n")
rows, cols = li.model_shape()
assert rows > 0 and cols >= 27 * 3 * 7
ok(f"MPS export carries the compiled model ({rows} rows, {cols} columns)")

# --- a hand-broken roster is rejected with a labelled violation -------------
broken = outcome.roster
night, morning = 2, 0
nurse = next(n for n in range(27) if broken.get(n, 0) == night)
broken.set(nurse, 1, morning)
bad = li.validate(broken)
assert not bad.feasible and any("C" in v for v in bad.violations)
ok(f"mutated roster rejected: {bad.violations[0]}")

# --- generator: deterministic, solvable, screened ---------------------------
gen_a = wm.generate(nurses=4, days=5, seed=11, density=0.25)
gen_b = wm.generate(nurses=4, days=5, seed=11, density=0.25)
assert gen_a.write() == gen_b.write()
out = gen_a.solve(time_limit=60.0)
assert out.status in ("optimal", "infeasible", "limit-reached")
if out.status == "optimal":
    assert gen_a.validate(out.roster).feasible
demand, capacity, gap_days = gen_a.capacity()
assert capacity >= 0 and isinstance(gap_days, list)
ok(f"generated ward is deterministic and {out.status} (demand {demand}, capacity {capacity})")

# --- tiny instance: exact solver agrees with exhaustive enumeration ---------
tiny = wm.generate(nurses=2, days=2, seed=3, density=0.4)
exact = tiny.solve()
brute = tiny.brute_force()
assert exact.status == brute.status
if exact.status == "optimal":
    assert exact.objective == brute.objective
ok("branch-and-bound matches brute force on a tiny ward")

# --- error paths surface as exceptions --------------------------------------
try:
    wm.read_instance("{}")
    raise AssertionError("malformed document accepted")
except ValueError:
    ok("malformed document raises ValueError")

try:
    li.solve(time_limit=-1.0)
    raise AssertionError("negative time limit accepted")
except ValueError:
    ok("negative time limit raises ValueError")

try:
    outcome2 = wm.builtin_general_ward(0).solve(node_limit=1)
    assert outcome2.status in ("optimal", "limit-reached")
    ok(f"general ward under a 1-node budget reports {outcome2.status!r}")
except RuntimeError as e:
    raise AssertionError(f"node-limited solve errored: {e}")

print(f"\nall {checks} smoke checks passed")
