#!/usr/bin/env python3
"""Closed-form success curves for the three memory policies, via the same
generators `mnemex export-curves` uses. Writes CSVs and samples a few points."""

import sys
from pathlib import Path

from mnemex import CURVE_GENERATORS, SimConfig, export_curves

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("curves")
config = SimConfig()  # 500 turns, base 80%, keep-everything decays, hybrid drifts up

written = export_curves(config, out)
print("wrote:", *[p.name for p in written])

print(f"\n{'turn':>6} {'all_add':>9} {'fixed':>7} {'hybrid':>8}")
series = {name: dict(gen(config)) for name, gen in CURVE_GENERATORS.items()}
for t in (0, 50, 100, 250, 500):
    print(f"{t:>6} {series['all_add'][t]:>9.2f} {series['fixed'][t]:>7.2f} "
          f"{series['hybrid'][t]:>8.2f}")

print("\nall_add hits its clamp floor (70) once clutter outruns the base rate;")
print("hybrid compounds a small per-turn gain and never dips below its floor.")
