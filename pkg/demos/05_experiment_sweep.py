"""
Accuracy and runtime sweep
==========================

Random subcircuits of equal width are chained by CX gates and cut on the
shared wire. Each trial compares every reconstruction method against the uncut
simulation and records the wall-clock time.
"""
import csv
import tempfile
from pathlib import Path

from cutrecon.harness import ExperimentSpec, run_sweep, summarize, write_rows

spec = ExperimentSpec(cuts=2, trials=8, seed=11)
rows = run_sweep(spec, widths=[2, 3, 4])
print(len(rows), "rows")

for s in summarize(rows):
    print(f"width {s['width']} {s['method']:>16}: median avd_abs {s['median']:.2e} "
          f"[{s['q25']:.1e}, {s['q75']:.1e}], median {s['median_seconds'] * 1e3:.2f} ms")

out = Path(tempfile.mkdtemp()) / "sweep.csv"
write_rows(rows, out)
with open(out) as fh:
    print(next(csv.reader(fh)))
print("written to", out)
