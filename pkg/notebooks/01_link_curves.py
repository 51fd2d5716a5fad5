# %% [markdown]
# # Link curves
#
# A photonic link trades rate for quality: pumping harder heralds more
# ebits per slot but lets multi-photon noise in.  This script builds the
# fidelity-vs-capacity curve of a single link, shows what dark counts do at
# low rates and how the monotone repair turns the raw curve into a usable
# routing metric.

# %%
from __future__ import annotations

import numpy as np

from fidroute.curves import (
    CapacityGrid,
    LinkParams,
    build_link_curve,
    emission_for_probability,
    fidelity_from_werner,
    link_fidelity,
    link_operating_indices,
    success_probability,
)

grid = CapacityGrid()
print(f"{grid.size} grid points from c = {grid.capacities[0]} down to {grid.capacities[-1]:.2e}")

# %% [markdown]
# ## From emission probability to capacity
#
# The heralding probability saturates at 1/2, so capacities at or above
# ``n_e / 2`` are out of reach.

# %%
eps = 0.35
for p_em in (0.01, 0.1, 1.0, 2.0, 10.0):
    p = success_probability(p_em, eps)
    print(f"p_em = {p_em:6.2f}  ->  p = {p:.6f}  (inverse gives {emission_for_probability(p, eps):.6f})")

# %% [markdown]
# ## Dark counts
#
# Without dark counts the fidelity only improves as the rate drops.  With a
# dark-count probability of 1e-3 the noise term ``p_dark / p`` takes over at
# small ``p`` and the raw curve has an interior maximum.

# %%
clean = LinkParams(epsilon=eps)
dark = LinkParams(epsilon=eps, p_dark=1e-3)
rows = [0, 64, 160, 320, 480, 640, 960, 1280]
print(f"{'capacity':>12} {'F clean':>9} {'F dark raw':>11} {'F dark repaired':>16}")
raw = build_link_curve(dark, grid, repair=False).values
fixed = build_link_curve(dark, grid).values
ideal = build_link_curve(clean, grid).values
for k in rows:
    print(
        f"{grid.capacity(k):12.3e} {fidelity_from_werner(ideal[k]):9.4f} "
        f"{fidelity_from_werner(raw[k]):11.4f} {fidelity_from_werner(fixed[k]):16.4f}"
    )

# %% [markdown]
# ## Repair
#
# Any capacity below the peak can be served by running the link at the peak
# and discarding the surplus, so the repaired curve holds the peak value on
# the whole low-rate side.  The operating index records where the link
# should actually run.

# %%
peak = int(np.argmax(raw))
ops = link_operating_indices(dark, grid)
print(f"raw peak at c = {grid.capacity(peak):.3e}, F = {fidelity_from_werner(raw[peak]):.4f}")
print(f"request c = {grid.capacity(1000):.3e} is served by running at c = {grid.capacity(int(ops[1000])):.3e}")
assert np.all(np.diff(fixed) >= 0)

# %% [markdown]
# The value at ``p_em = 2`` for the dark link with a small ceiling offset:

# %%
print(link_fidelity(2.0, LinkParams(eps, p_dark=1e-3, beta=1e-3)))
