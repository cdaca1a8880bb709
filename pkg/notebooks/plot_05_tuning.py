"""
Hyperparameter search
=====================

The tree-structured Parzen search starts with random trials and then
proposes points that look more like the good ones seen so far.
"""

from vqabench.hypertune import ParamDomain, search, tune

space = [ParamDomain.continuous("v", -10, 10), ParamDomain.categorical("shape", ["flat", "steep"])]


def loss(cfg):
    k = 1.0 if cfg["shape"] == "flat" else 4.0
    return k * (cfg["v"] - 3.0) ** 2


res = search(space, loss, n_trials=30, seed=0)
print("best", res.best_config, "loss", round(res.best_loss, 4))
print("first five random trials, best loss", round(min(t.loss for t in res.trials[:5]), 4))

# %%
# Tuning QAOA's layer count on the MaxCut tuning instance (small budget here).
qaoa_res = tune("qaoa", 4, n_trials=6, seed=0, budget=2000)
for t in qaoa_res.trials:
    print(t.config, round(t.loss, 4), t.eval_count)
