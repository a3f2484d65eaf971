# %% [markdown]
# # Mean-square error against the tuning gain
#
# A small Monte Carlo sweep over r. The full-size version (200 paths,
# horizon 20) is the mean-square scaling acceptance check.

# %%
import warnings

import numpy as np

from event_eso import BelowRStarWarning, LinearDesign, SimConfig, run_ensemble, section_iv_noise, section_iv_plant, sweep_r

plant, noise = section_iv_plant(), section_iv_noise()
with warnings.catch_warnings():
    warnings.simplefilter("ignore", BelowRStarWarning)
    lin = LinearDesign((3.0, 3.0, 1.0), r=15.0)
sim = SimConfig(t_end=6.0, t_transient=3.0, master_seed=1)

# %%
ens = run_ensemble(plant, noise, lin, sim, paths=8)
print("tail MSE per state:", np.array2string(ens.mean_tail_mse, precision=4))
print("triggers per path:", ens.trigger_counts)
print(f"smallest inter-event time {ens.min_inter_event:.4e} vs dwell {ens.dwell:.4e}")

# %%
with warnings.catch_warnings():
    warnings.simplefilter("ignore", BelowRStarWarning)
    sw = sweep_r(plant, noise, lin, sim, [8.0, 12.0, 16.0, 24.0], paths=8)
for r, row, trig in zip(sw.r_values, sw.tail_mse, sw.mean_triggers):
    print(f"r={r:4.0f}  tail MSE {np.array2string(row, precision=4)}  mean triggers {trig:.0f}")
print("fitted log-log slopes:  ", np.round(sw.slopes, 2))
print("predicted (upper bound):", -sw.predicted_exponents)
