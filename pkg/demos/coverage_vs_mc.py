"""Analytic access coverage against a Monte Carlo estimate."""

# %% Setup
import numpy as np

import uavhetnet as u

params, _ = u.paper_defaults()
thresholds_db = np.array([-20.0, -15.0, -10.0, -5.0, 0.0])
t = 10.0 ** (thresholds_db / 10.0)

# %% Exact gamma tail vs the Alzer bound vs simulation
exact = [u.access_coverage(x, params).overall for x in t]
alzer = [u.access_coverage(x, params, alzer=True).overall for x in t]
mc = u.estimate_coverage(params, t, 1.0, n=20000, seed=7).overall
for row in zip(thresholds_db, exact, alzer, mc.mean):
    print("T={:5.1f} dB  exact={:.4f}  alzer={:.4f}  mc={:.4f}".format(*row))
