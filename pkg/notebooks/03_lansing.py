"""
Lansing Woods
=============

Six tree species in a 924 ft square plot. The data are not bundled; export
them from R with

    write.csv(as.data.frame(spatstat.data::lansing), "data/lansing.csv")

and either place the file at ``data/lansing.csv`` or point
``PPGRAPH_LANSING_CSV`` at it.
"""

# %%
import os
import sys
from pathlib import Path

from ppgraph import AnalysisConfig, analyze, components_and_neighbourhoods, load_pattern

path = Path(os.environ.get("PPGRAPH_LANSING_CSV", "data/lansing.csv"))
if not path.is_file():
    sys.exit(f"no Lansing data at {path}")

# the exported coordinates are already scaled to the unit square
trees = load_pattern(path, type="marks", window=(0, 0, 1, 1))
print(trees.count_by_label())

# %%
result = analyze(trees, AnalysisConfig(alpha=0.4))
print("half width", result.half_width, "regularized", result.inverse.n_regularized)
for a, b, stat, p, q, edge in result.pairs():
    print(f"{a:>9} -- {b:<9} {stat:.3f} at ({p}, {q}){'  edge' if edge else ''}")

# %%
components, neighbours = components_and_neighbourhoods(result.graph)
print("components:", [sorted(c) for c in components])
print("maple neighbours:", sorted(neighbours["maple"]))
