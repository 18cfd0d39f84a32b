# %% [markdown]
# Dimension estimates and the scaled error sequence.

# %%
from carpetquant.asymptotics import beta, dimension_estimate, f_paper, scaled_profile

print("beta =", beta())
for lv in (1, 10, 100, 1000):
    print(f"l={lv:5d}  estimate={dimension_estimate(4**lv):.7f}")

# %% [markdown]
# The scaled error keeps oscillating between 1/4 and about 0.483, so it has
# no limit.

# %%
rep = scaled_profile(10, 10, 64)
print("inf", rep.inf_observed, "sup", rep.sup_observed)
print("on [1, 2) only:", rep.inf_lower_half, rep.sup_lower_half)
print("published f at 1 and 2:", f_paper(1), f_paper(2))
for s in rep.samples[::8]:
    print(f"x={s.x:.4f}  scaled={s.scaled:.6f}")
