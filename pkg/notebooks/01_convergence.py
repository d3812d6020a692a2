# %% [markdown]
# # Convergence of the discrete spectrum
#
# The embedded-boundary Laplacian is second order on smooth domains.  This
# walk-through halves the mesh width on the unit square and the unit disk
# and compares the lowest eigenvalues with their closed forms.

# %%
import numpy as np

from spectral_gaps import (assemble_euclidean, disk, disk_spectrum, rasterize,
                           rectangle_spectrum, smallest_eigenpairs, square)

K = 6
cases = {"square": (square(), rectangle_spectrum(1, 1, K).eigenvalues),
         "disk": (disk(), disk_spectrum(1.0, K).eigenvalues)}

# %% [markdown]
# Relative errors per mesh width.  The observed order is the base-2 log of
# the error ratio between successive meshes.

# %%
for name, (domain, exact) in cases.items():
    print(f"{name}: exact {np.round(exact, 4)}")
    prev = None
    for h in (1 / 16, 1 / 32, 1 / 64):
        grid = rasterize(domain, h)
        spec = smallest_eigenpairs(assemble_euclidean(grid), K, tol=1e-9, seed=0,
                                   keep_vectors=False)
        err = np.max(np.abs(spec.eigenvalues - exact) / exact)
        order = "" if prev is None else f"  order {np.log2(prev / err):.2f}"
        print(f"  h=1/{round(1 / h):<3d} N={grid.size:<5d} max rel err {err:.3e}{order}")
        prev = err
