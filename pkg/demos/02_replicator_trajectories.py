# %% [markdown]
# # Replicator trajectories and punishment sweeps

# %%
import numpy as np

from covigov import GameParams, detect_convergence, integrate_replicator, sweep
from covigov.dynamics import convergence_time
from covigov.game import stable_step

base = GameParams.baseline()

# %% [markdown]
# Payoff differences reach several thousand, so the system is stiff for an
# explicit method.  The default step comes from a bound on the Jacobian
# spectrum; coarser steps overshoot and can park the state on a vertex that
# is actually repelling.

# %%
print("default step:", stable_step(base))
traj = integrate_replicator(base, (0.5, 0.5, 0.5, 0.5), t_end=50)
prof = detect_convergence(traj)
print(f"{traj.reason} after {len(traj.t)} samples, converged to {prof}, at t={convergence_time(traj, prof):.3f}")

# %% [markdown]
# Halving the step leaves the end state unchanged to round-off.

# %%
half = integrate_replicator(base, (0.5,) * 4, 50, traj.dt / 2)
print(np.max(np.abs(half.final - traj.final)))

# %% [markdown]
# ## Sweeps over punishment severity
#
# From the centre of the cube both sweeps end at E for the reference numbers.
# Starting closer to cooperative behaviour shows the role of beta.

# %%
for symbol in ("phi", "beta"):
    res = sweep(base, symbol, [0.1, 0.3, 0.5, 0.7])
    print(symbol, [(r.value, r.profile.letter if r.profile else None) for r in res.rows])

res = sweep(base, "beta", [0.2, 0.3, 0.4, 0.6], init=(0.9, 0.9, 0.9, 0.9))
print("from (0.9,...):", [(r.value, r.profile.letter if r.profile else None) for r in res.rows])
