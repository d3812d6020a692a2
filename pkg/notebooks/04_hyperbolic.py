# %% [markdown]
# # Gaps on a hyperbolic rectangle
#
# The Laplace-Beltrami operator of the upper half-plane is discretized on
# [0, 1] x [1, 2].  The lowest eigenvalue must exceed 1/4 for the gap
# argument to go through; the gap constant depends on a free mean-curvature
# parameter H0^2, which is scanned below.

# %%
from spectral_gaps import BoundConfig, hyperbolic_rect
from spectral_gaps import bounds, quadrature

basis, spec = quadrature.build_basis(hyperbolic_rect(0, 1, 1, 2), 1 / 32, 12)
lam = spec.eigenvalues
print(f"lambda_1 = {lam[0]:.4f}")

# %%
for check in bounds.proof_step_hyperbolic(spec)[:8]:
    print(f"  k={check.k:2d} gap {check.lhs:9.3f} <= {check.rhs:9.3f}  {check.status}")

# %%
for h0 in (0.0, 0.25, 0.5, 1.0):
    c = bounds.theorem_constant(lam[0], 2, BoundConfig(h0_squared=h0), "hyperbolic")
    print(f"  H0^2 = {h0:4.2f}: constant {c:.2f}")

# %% [markdown]
# The integration-by-parts identity with f = log y holds to discretization
# accuracy.

# %%
lhs, rhs = quadrature.ibp_identity(basis, quadrature.hyperbolic_log(basis.grid), 1)
print(f"  lhs {lhs:.5f}  rhs {rhs:.5f}  rel diff {abs(lhs - rhs) / abs(rhs):.2e}")
