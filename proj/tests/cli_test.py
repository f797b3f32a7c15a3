"""End-to-end checks of the vsp command line: outputs, exit codes, reruns.

Usage: cli_test.py <vsp binary> <source dir>
"""

import json
import os
import subprocess
import sys
import tempfile

VSP, SRC = sys.argv[1], sys.argv[2]
failures = []


def run(*args):
    return subprocess.run([VSP, *args], capture_output=True, text=True)


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f"  {detail}" if detail and not cond else ""))
    if not cond:
        failures.append(name)


# theory
r = run("theory", "--n", "5", "--a", "0", "--tau", "0.25")
check("theory a=0 tau=0.25 exits 0", r.returncode == 0, r.stderr)
check("theory a=0 tau=0.25 law", json.loads(r.stdout)["size_law"]["exact"] == ["2/5", "1/5", "1/5", "1/5", "0"])
r = run("theory", "--n", "5", "--a", "0", "--tau", "0.4")
check("theory a=0 tau=0.4 law", json.loads(r.stdout)["size_law"]["exact"] == ["3/5", "1/5", "1/5", "0", "0"])
r = run("theory", "--n", "5", "--a", "0.35", "--tau", "0.255")
check("theory eta law", json.loads(r.stdout)["size_law"]["exact"] == ["2/5", "0", "0", "6/125", "69/125"])
r = run("theory", "--n", "5", "--a", "0.2", "--tau", "0.15")
check("theory uncovered exits 3", r.returncode == 3, str(r.returncode))
check("theory uncovered still reports", json.loads(r.stdout)["regime"] == "uncovered")
r = run("theory", "--n", "5", "--a", "0", "--tau", "0.3", "--format", "csv")
check("theory csv", r.stdout.startswith("kind,p1,p2,p3,p4,p5\n"), r.stdout[:80])

# enumerate
r = run("enumerate", "--n", "5", "--a", "0", "--tau", "0.3", "--format", "csv")
check("enumerate csv row", "decimal,0.420,0.200,0.199,0.181,0.000" in r.stdout, r.stdout)
r = run("enumerate", "--n", "5", "--a", "0", "--tau", "0.3", "--support-cap", "10")
check("enumerate support cap exits 4", r.returncode == 4, str(r.returncode))
r = run("enumerate", "--n", "3", "--a", "0", "--tau", "0.4", "--arithmetic", "float")
check("enumerate refuses float", r.returncode == 1, str(r.returncode))
r = run("enumerate", "--n", "3", "--a", "0", "--tau", "0.4", "--transitions", "2", "--no-states")
d = json.loads(r.stdout)
check("enumerate transitions flag", d["transitions"] == 2 and d["horizon"] is None and "states" not in d)
r = run("enumerate", "--n", "3", "--a", "0", "--tau", "0.4", "--transitions", "2", "--horizon", "3")
check("horizon and transitions are exclusive", r.returncode == 1, str(r.returncode))

# trace
r = run("trace", "--n", "3", "--a", "0", "--tau", "0.4", "--seq", "2,1")
lines = [json.loads(l) for l in r.stdout.splitlines()]
check("trace explicit sequence exits 0", r.returncode == 0, r.stderr)
check("trace final infected", lines[-1]["final"]["infected"] == [1, 2])
check("trace line types", [l.get("type") for l in lines] == [None, "initial", "epoch", "epoch", "summary"])
r = run("trace", "--n", "3", "--a", "0", "--tau", "0.4", "--seq", "2,7")
check("trace bad sequence exits 1", r.returncode == 1, str(r.returncode))
r = run("trace", "--n", "5", "--a", "0", "--tau", "0.12", "--seed", "3", "--max-epochs", "1")
check("trace cut short exits 2", r.returncode == 2, str(r.returncode))

# simulate
args = ("simulate", "--n", "5", "--a", "0", "--tau", "0.12", "--samples", "2000", "--seed", "9")
one, two = run(*args), run(*args, "--threads", "3")
check("simulate exits 0", one.returncode == 0, one.stderr)
check("simulate is byte-identical across thread counts", one.stdout == two.stdout)
check("simulate is byte-identical on rerun", run(*args).stdout == one.stdout)
r = run("simulate", "--n", "5", "--a", "0", "--tau", "0.12", "--samples", "10")
check("simulate without seed exits 1", r.returncode == 1, str(r.returncode))
r = run("simulate", "--n", "5", "--a", "0", "--tau", "0.12", "--samples", "50", "--seed", "1", "--max-epochs", "2")
check("simulate with unsettled samples exits 2", r.returncode == 2, str(r.returncode))

# compare
grid = os.path.join(SRC, "configs", "table1_grid.json")
r = run("compare", "--grid", grid)
check("compare table grid exits 0", r.returncode == 0, r.stderr)
rows = json.loads(r.stdout)["rows"]
check("compare covers every grid point", len(rows) == 38, str(len(rows)))
check("compare finds no uncovered grid point", all(row["regime"] != "uncovered" for row in rows))
with tempfile.TemporaryDirectory() as tmp:
    out = os.path.join(tmp, "cmp.csv")
    r = run("compare", "--grid", grid, "--format", "csv", "-o", out)
    check("compare csv to file", r.returncode == 0 and open(out).readline().startswith("a,tau,horizon"), r.stderr)
    r2 = run("compare", "--grid", grid, "--format", "csv")
    check("compare output is byte-identical on rerun", r2.stdout == open(out).read())

r = run("compare", "--grid", grid, "--plot-data")
plot = r.stdout.splitlines()
check("compare plot data", plot[0] == "a,tau,horizon,tv,tv_exact" and len(plot) == 1 + 38 * 10, str(len(plot)))

# config files and flag precedence
cfg = os.path.join(SRC, "configs", "high_action.json")
r = run("theory", "--config", cfg)
check("theory from config", json.loads(r.stdout)["size_law"]["exact"][3] == "6/125")
r = run("theory", "--config", cfg, "--tau", "0.3")
check("flags override the config", json.loads(r.stdout)["params"]["tau"] == "3/10")
r = run("trace", "--config", os.path.join(SRC, "configs", "heterogeneous.json"), "--seed", "1")
check("heterogeneous config runs", r.returncode in (0, 2), str(r.returncode))

# usage errors
check("missing subcommand exits 1", run().returncode == 1)
check("help exits 0", run("--help").returncode == 0)
check("invalid tau exits 1", run("theory", "--n", "5", "--a", "0", "--tau", "1.5").returncode == 1)

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
