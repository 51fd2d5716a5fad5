# %% [markdown]
# # Three-party star selection
#
# A GHZ state for three targets is assembled at a center node that holds an
# ebit with each target.  For every candidate center the three bipartite
# envelopes are combined, and the best center is kept per end-to-end rate.

# %%
from __future__ import annotations

import numpy as np

from fidroute.curves import CapacityGrid, Model
from fidroute.multipartite import ghz_fidelity, select_star
from fidroute.network import generate_rgg

print("GHZ fidelity of perfect arms:", ghz_fidelity(1, 1, 1))
print("GHZ fidelity of useless arms:", ghz_fidelity(0, 0, 0))
print("GHZ fidelity of (0.9, 0.8, 0.7):", ghz_fidelity(0.9, 0.8, 0.7))

# %% [markdown]
# ## A geometric network

# %%
net = generate_rgg(60, 8, seed=4)
targets = (3, 17, 42)
grid = CapacityGrid()

flow = select_star(net, *targets, Model.FLOW, grid)
single = select_star(net, *targets, Model.SINGLE, grid, m_star=8)
print(f"flow model: {len(flow.rows())} feasible grid points, centers used {sorted(set(flow.sources[flow.sources >= 0].tolist()))}")
print(f"single model (grid {single.grid.m} per octave): {len(single.rows())} feasible points")

# %% [markdown]
# ## The trade-off
#
# Rows give the end-to-end rate, the GHZ fidelity, the chosen center and
# the rate assigned to each arm.  An arm of rate 1 means the center is that
# target itself.

# %%
def show(result, every):
    print(f"{'capacity':>11} {'F_GHZ':>7} {'center':>6} {'c1':>10} {'c2':>10} {'c3':>10}")
    for c, f, s, a, b, d in result.rows()[::every]:
        print(f"{c:11.3e} {f:7.4f} {s:6d} {a:10.3e} {b:10.3e} {d:10.3e}")


show(flow, 120)
print()
show(single, 30)

# %% [markdown]
# The flow model runs all three arms at the common rate; the single-ebit
# model spreads the rate budget over the arms so that the product of arm
# capacities equals the end-to-end capacity.

# %%
k = int(np.flatnonzero(single.sources >= 0)[len(single.rows()) // 2])
arms = single.arm_capacities(k)
print(f"c = {single.grid.capacity(k):.3e}, arm product = {np.prod([a for a in arms]):.3e}")
