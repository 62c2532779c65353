"""Thin the C60 distance list and run the matheuristic at several densities.

Values are grouped by multiplicity so the MILP stays small; with a dense
relaxation out of reach the solver falls back to its heuristic incumbent.
Expect this to take several minutes on one core.
"""

import sys
import tempfile
from pathlib import Path

from udgp import build_c60, cli, fileio, true_assignment

work = Path(sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="c60sweep"))
work.mkdir(parents=True, exist_ok=True)
x = build_c60()
delta, _ = true_assignment(x)
fileio.write_distances(work / "c60.udgp", delta)
fileio.write_xyz(work / "c60.xyz", x)

cli.main(["sweep", str(work / "c60.udgp"), "--density", "0.995", "0.997", "0.999",
          "--seed", "0", "--group-multiplicities", "--ref-xyz", str(work / "c60.xyz"),
          "--out", str(work / "sweep")])
print((work / "sweep" / "sweep.tsv").read_text())
