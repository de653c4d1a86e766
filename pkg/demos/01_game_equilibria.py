# %% [markdown]
# # Stability of the pure strategy profiles
#
# The four-party game has 16 pure profiles (x, y, z, m): victim action,
# perpetrator stops attacking, media guides correctly, government regulates
# strongly.  At a vertex the replicator Jacobian is diagonal, so its
# eigenvalues are read straight off the diagonal.

# %%
from covigov import GameParams, classify_all, classify_point, ess_conditions, validate_path

base = GameParams.baseline()
for rep in classify_all(base):
    print(f"{rep.profile!s:<12} {str(rep.eigenvalues):<34} {rep.classification.value}")

# %% [markdown]
# Two profiles are stable at the reference numbers: E, where media and
# government stay passive, and K, where everybody cooperates.  The symbolic
# condition for the media direction at K explains why the media penalty
# matters.

# %%
for cond in ess_conditions("K"):
    print(f"{cond.player:<12} {cond.describe()}")

for beta in (0.3, 0.4):
    rep = classify_point(base.replace(beta=beta), "K")
    print(f"beta={beta}: {rep.classification.value}, eigenvalues {rep.eigenvalues}")

# %% [markdown]
# The government direction at G=(1,1,0,1) is repelling for every beta in
# [0, 0.3] with these numbers.

# %%
print([classify_point(base.replace(beta=b), "G").eigenvalues[3] for b in (0.0, 0.1, 0.2, 0.3)])

# %% [markdown]
# ## Governance paths
#
# A path is a sequence of phases, each with its own parameters and target
# vertex.  It is feasible when every target is stable in its own phase.

# %%
early = base.replace(delta=50)  # attacking pays little once victims speak out
plan = [(early, "B", "victims alone"), (base, "K", "full governance")]
print(validate_path(plan).to_dict())

weak = [(early, "B"), (base.replace(beta=0.3), "K", "weak media penalty")]
print(validate_path(weak).failures)
