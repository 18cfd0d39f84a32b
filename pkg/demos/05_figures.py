# %% [markdown]
# SVG pictures of optimal configurations for n = 1..16.

# %%
from pathlib import Path

from carpetquant.optimal import optimal_set_at
from carpetquant.render import render_svg

out = Path(__file__).resolve().parent / "figures"
out.mkdir(exist_ok=True)
for n in range(1, 17):
    svg = render_svg(optimal_set_at(n, 0)[0], carpet_depth=3, title=f"n = {n}")
    (out / f"n{n:02d}.svg").write_text(svg)
print("wrote", len(list(out.glob("*.svg"))), "files to", out)
