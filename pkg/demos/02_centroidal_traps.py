# %% [markdown]
# Two centroidal configurations that are not optimal.
#
# Both sit on a diagonal of the square.  The measure is symmetric about that
# line, so cylinders centred on it are split evenly between the two mirror
# sites and the centroid conditions can be checked exactly.

# %%
from carpetquant.oracle import diagonal_trap_check

rep = diagonal_trap_check(6)

print("diagonal pair (7/10, 3/10), (3/10, 7/10)")
print("  centroidal:", rep.pair_is_cvt)
print("  exact distortion:", rep.pair_distortion, "lower bound:", rep.pair_lower_bound)
print("  optimum V_2:", rep.v2)

# %%
print("three points with two mirrored across the diagonal")
print("  centroidal:", rep.beta3_is_cvt)
print("  certified distortion:", rep.beta3_bounds)
print("  partial-sum lower bound:", rep.beta3_lower_bound, "=", float(rep.beta3_lower_bound))
print("  optimum V_3:", rep.v3)

# %% [markdown]
# Lloyd iterations on a depth-6 discretization started at each trap barely move.

# %%
print("pair drift after Lloyd:", rep.pair_lloyd_shift)
print("three-point run:", rep.beta3_lloyd.iterations, "steps, atom distortion", float(rep.beta3_lloyd.distortion))
