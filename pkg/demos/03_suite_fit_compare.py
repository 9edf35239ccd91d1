"""From the bundled stimuli to a model comparison.

1. Estimate effort and risk for the 24 bundled trials.
2. Invent two groups of "participants": one judging difficulty mostly by
   risk, one mostly by effort.
3. Fit the full and lesioned models and bootstrap their correlations.

The bundled scenes are a reconstruction, not the original stimuli, and the
participants are synthetic; the point is the workflow, not the numbers.
"""

import numpy as np

from blockplan import HumanDataset, bootstrap_compare, fit_all, load_suite, run_suite, zscore_and_average

suite = run_suite(load_suite(), N=40, M=10, seed=0)
E = np.array([r.effort.sample_mean for r in suite.results])
R = np.array([r.risk.risk for r in suite.results])
ids = tuple(r.trial_id for r in suite.results)
for r in suite.results:
    print(f"{r.trial_id:5s} E={r.effort.sample_mean:7.1f}  R={r.risk.risk:.3f}  plan={r.plan_length}")

rng = np.random.default_rng(0)


def participants(name, signal, P=15):
    z = (signal - signal.mean()) / signal.std()
    resp = z + rng.normal(0, 0.5, (P, len(z)))
    return HumanDataset(name, tuple(f"p{i}" for i in range(P)), ids, resp * 10 + 50)


for ds in (participants("risk-minded", 0.2 * E / E.std() + R / max(R.std(), 1e-9)),
           participants("effort-minded", E)):
    fits = fit_all(E, R, zscore_and_average(ds))
    boot = bootstrap_compare(ds, {m: f.predictions for m, f in fits.items()}, B=500, seed=1)
    print(f"\n{ds.name}")
    for m, f in fits.items():
        print(f"  {m:6s} rmse {f.rmse:.3f}  r {f.pearson_r:.3f}  "
              f"boot median {boot.median[m]:.3f} [{boot.lower[m]:.3f}, {boot.upper[m]:.3f}]")
    print(f"  P(risk > effort) = {boot.exceedance[('risk', 'effort')]:.3f}")

# Note the risk-minded group: the risk-only model can beat the full model,
# because R on its own is not a combination of E(1-R) and E R.
