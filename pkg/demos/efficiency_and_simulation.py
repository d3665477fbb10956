"""
Efficiency cost and robustness gain
===================================

Robustness is paid for with asymptotic efficiency.  The ARE table shows the
price; a small contamination study shows what it buys.
"""
import numpy as np

from mpdport import SimulationScenario, are_table, asymptotic_report, run_study

table = are_table(alphas=(0.0, 0.1, 0.2, 0.5, 1.0), n_max=6)
print("ARE    " + "  ".join(f"a={a:<5g}" for a in table.alphas))
for n, row in zip(table.ns, table.values):
    print(f"N={n:<4d} " + "  ".join(f"{v:7.4f}" for v in row))

# %%
rep = asymptotic_report(0.2, 2, sigma=[[1.0, 0.2], [0.2, 1.0]])
print("\nasymptotic covariance of the location estimator, alpha = 0.2:")
print(np.round(rep.v_mu, 4))
print("of vecs(Sigma hat):")
print(np.round(rep.v_sigma, 4))

# %%
# 200 replicates keep this quick; the CLI `simulate` command runs full studies
for eps in (0.0, 0.1):
    sc = SimulationScenario.standard(2, 20, eps, alphas=(0.0, 0.2, 0.5), n_s=200, seed=11)
    res = run_study(sc)
    cells = ", ".join(f"alpha={r.alpha:g}: {r.mse:.3f}" for r in res.rows)
    print(f"\nMSE at N=2, T=20, eps={eps}: {cells}")
