"""Association probabilities of a ground user over UAV density and LoS height."""

# %% Defaults: urban, 46/27/33 dBm
import numpy as np

import uavhetnet as u

params, svc = u.paper_defaults()
rep = u.association_report(params)
print(f"A_MA={rep.a_ma:.6g}  A_UAL={rep.a_ual_bar:.6g}  A_UAN={rep.a_uan_bar:.6g}")

# %% Density sweep: LoS association peaks at an intermediate density
lam = np.logspace(-7, -1, 13)
for env in ("urban", "high-rise"):
    sw = u.assoc_sweep_density(params.with_(env=u.environment(env)), lam)
    print(f"{env:9s} argmax lambda_UA={sw.lambda_star:.3g}  peak={sw.a_ual_star:.3f}  at 1e-1: {sw.a_ual[-1]:.3f}")

# %% Fixed-height sweep: sparse UAVs lose to the TBS tier at large heights
for lam_ua in (1e-5, 1e-7):
    hs = u.assoc_vs_height([100, 300, 500], params.with_(lambda_ua=lam_ua))
    print(f"lambda_UA={lam_ua:g}: A_M={np.round(hs.a_m, 3)}  A_UAN={np.round(hs.a_uan, 3)}")
