"""
From events to a spectral matrix
================================

Walks a simulated three-type pattern through the DFT, the raw periodograms,
box smoothing and the co/quadrature decomposition.
"""

# %%
import numpy as np

from ppgraph import (ClusterType, FrequencyGrid, SimSpec, SmoothingSpec, auto_periodogram,
                     cross_periodogram, decompose_cross, dft, radial_spectrum, simulate,
                     smooth_field, spectral_matrix)

spec = SimSpec({"a": ClusterType(150, 2.0, 0.02, (1,)),
                "b": ClusterType(150, 2.0, 0.02, (1, 2)),
                "c": ClusterType(150, 2.0, 0.02, (2,))}, seed=1)
pattern = simulate(spec)
print(pattern.count_by_label())

# %%
# The grid covers p = 0..16 and q = -16..15; the other half plane follows by
# conjugate symmetry.
grid = FrequencyGrid(16)
Fa = dft(pattern, 0, grid)
print("grid shape", grid.shape, "frequencies", grid.size)
print("F_a at DC equals the count:", Fa.at(0, 0).real)

# %%
# A Poisson type has a flat spectrum at its count. Clustering adds power at
# low frequencies that decays on the scale 1 / (2 pi sigma). Type b pools two
# parent groups, and its smoothed ring averages show the decay towards n.
fb = smooth_field(auto_periodogram(dft(pattern, 1, grid)), SmoothingSpec(3))
for r, mean in radial_spectrum(fb)[::3]:
    print(f"ring {r:2d}  mean periodogram {mean:7.0f}")
print("count of b:", pattern.counts[1])

# %%
# Raw cross-periodograms are rank one, so they are smoothed over a box of
# (2h + 1)^2 neighbouring ordinates before anything is inverted.
fab = cross_periodogram(Fa, dft(pattern, 1, grid))
smoothed = smooth_field(fab, SmoothingSpec(2))
dec = decompose_cross(smoothed)
print("co-spectrum at (1, 0):", round(float(dec.co[1, 16]), 2))
print("quadrature at (1, 0):", round(float(dec.quad[1, 16]), 2))
print("phase at (1, 0):", round(float(dec.phase[1, 16]), 3))

# %%
S = spectral_matrix(pattern, grid, SmoothingSpec(4))
eig = np.linalg.eigvalsh(S.values[S.grid.target_mask()])
print("smallest eigenvalue over the grid:", eig[:, 0].min())
