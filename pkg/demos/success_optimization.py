"""Successful content delivery and the optimal access/xHaul bandwidth split."""

# %% Setup
import uavhetnet as u

params, svc = u.paper_defaults()
model = u.SuccessModel(params, svc)

# %% Delivery probability falls with the number of users sharing the access band
for n_users in (2, 5, 8):
    bd = model.evaluate(u.CachePolicy(), n_users=n_users)
    print(f"N_u={n_users}: P_suc={bd.p_suc:.3f}")

# %% Optimal beta grows with the cache size
for cache in (0, 200, 600, 1000):
    opt = u.optimize_beta(svc, params, u.CachePolicy(cache_size=cache), model=model)
    print(f"C={cache:4d}: beta*={opt.beta_star:.3f}  P_suc*={opt.p_suc_star:.3f}")
