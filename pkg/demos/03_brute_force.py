# %% [markdown]
# Multi-start Lloyd on depth-5 atoms against the constructed optima.

# %%
import time

from carpetquant.oracle import OracleConfig, brute_force
from carpetquant.optimal import quantization_error

for n, restarts, seed in [(2, 64, 42), (3, 128, 7), (4, 64, 4), (5, 128, 5), (8, 64, 8)]:
    t0 = time.perf_counter()
    res = brute_force(OracleConfig(n=n, depth=5, restarts=restarts, seed=seed))
    print(
        f"n={n}: corrected {res.corrected_distortion} (V_n {quantization_error(n)}), "
        f"matched set #{res.matched_optimal}, {res.best_hits}/{restarts} restarts at the best value, "
        f"{time.perf_counter() - t0:.2f}s"
    )
