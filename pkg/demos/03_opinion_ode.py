# %% [markdown]
# # Opinion dissemination: thresholds, trajectories and equilibria

# %%
import numpy as np

from covigov import OpinionParams, endemic_equilibrium_numeric, endemic_equilibrium_printed
from covigov import integrate_opinion, r0, r0_spectral
from covigov.opinion import GROUPS

# %% [markdown]
# Reproduction numbers for the experimental groups.  The closed form leaves
# the flow from I2 back to bystanders out of the threshold, so it sits below
# the spectral radius of the next-generation matrix whenever m2 > 0.

# %%
for name in GROUPS:
    p = OpinionParams.group(name)
    print(f"{name:>8}: closed form {r0(p):.4f}   spectral {r0_spectral(p):.4f}")

# %% [markdown]
# The control group starting from 800 susceptibles, 100 bystanders and 50 of
# each disseminator type.

# %%
control = OpinionParams.control()
run = integrate_opinion(control, (800, 100, 50, 50, 0), t_end=100, dt=0.01)
print(run.metrics)
print("I2 at t = 0, 1, 5, 20, 100:", np.round(run.states[[0, 100, 500, 2000, -1], 3], 3))

# %% [markdown]
# I2 does not die out completely under control parameters: it settles at the
# positive stationary point.  The closed-form expressions for that point give
# the right S but negative B, I1 and I2.

# %%
numeric = endemic_equilibrium_numeric(control)
print("numeric:", np.round(numeric, 4))
print(endemic_equilibrium_printed(control, numeric).to_dict())
print("group 8:", endemic_equilibrium_numeric(OpinionParams.group(8)))
