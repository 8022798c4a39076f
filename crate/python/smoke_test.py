"""Smoke test for the nslab Python extension.

Build and install it first:  pip install ./crates/python --no-build-isolation
"""
import json
import math
import sys
import tempfile
from pathlib import Path

import nslab

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def check(name, ok, detail=""):
    print(f"{'ok  ' if ok else 'FAIL'} {name} {detail}")
    return ok


def main():
    results = []
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)

        # cos(3x + 4y) sits on the plateau of block 1 with L2 norm a/sqrt(2).
        n, a = 32, 0.8
        values = [
            a * math.cos(3 * (2 * math.pi * i / n) + 4 * (2 * math.pi * k / n))
            for i in range(n)
            for k in range(n)
        ]
        norm = nslab.besov_norm_of_values(values, n, 1.5, 2.0, float("inf"))
        oracle = 2**1.5 * a / math.sqrt(2)
        results.append(check("single mode norm", abs(norm - oracle) < 1e-12 * oracle, f"{norm:.12e}"))

        # |k| = sqrt(2) puts Taylor-Green in block 0, where the weight 2^{js} is 1.
        tg = tmp / "tg.bnsl"
        nslab.write_taylor_green(str(tg), 32)
        rows = nslab.block_table(str(tg), 2.0, 2.0)
        nonzero = [j for j, raw, _ in rows if raw > 1e-12]
        results.append(check("taylor-green lives in block 0", nonzero == [0], str(nonzero)))
        results.append(check("taylor-green norm", abs(nslab.besov_norm(str(tg), 2.0, 2.0, 1.0) - 2**-0.5) < 1e-12))

        steps, dt, snaps = nslab.solve(str(FIXTURES / "taylor_green.toml"), str(tmp / "run"))
        results.append(check("solve", (steps, snaps) == (100, 11), f"steps {steps} dt {dt}"))

        passed, text = nslab.sweep("inviscid", str(FIXTURES / "bandlimited.toml"), str(tmp / "sweep"))
        report = json.loads(text)
        results.append(check("bandlimited sweep", passed, f"T = {report['horizon']:.4g}"))

        reports = nslab.verify("interp", 2.0, 2.0, 1.0, samples=40, grids=[32, 64])
        results.append(check("interpolation check", all(ok for ok, _ in reports)))

        try:
            nslab.besov_norm(str(tmp / "missing.bnsl"), 1.0, 2.0, 2.0)
            results.append(check("missing file raises", False))
        except nslab.NslabError as e:
            results.append(check("missing file raises", "missing.bnsl" in str(e)))

    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
