# %% [markdown]
# Optimal sets of one to four means, checked with the exact evaluator.

# %%
from carpetquant import base_set, distortion_bounds, optimal_count, quantization_error

for m in range(1, 5):
    cb = base_set(m)
    iv = distortion_bounds(cb, 2)
    print(f"n={m}  points={[(str(x), str(y)) for x, y in cb]}")
    print(f"      V_n={quantization_error(m)}  evaluator={iv}  sets={optimal_count(m)}")

# %% [markdown]
# Past four points every optimal set repeats a small one inside each
# cylinder of the right level, so the error shrinks by a factor 36 per level.

# %%
for n in (4, 5, 8, 12, 16, 48, 64):
    print(n, quantization_error(n), optimal_count(n))
