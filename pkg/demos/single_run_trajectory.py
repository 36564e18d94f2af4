"""One full consensus run, narrated.

A population of 100 ignorant agents receives noisy quality evidence about
three states (qualities 0.25 / 0.5 / 0.75) and fuses beliefs pairwise with
Dubois & Prade's rule.  The population mean belief in the best state climbs
from 0 to 1 and the run stops once nothing has changed for 100 iterations.
"""

from dstcons import SimConfig, run

config = SimConfig(
    operator="dubois_prade",
    k=100,
    n=3,
    r=0.05,        # an agent receives evidence once every ~20 iterations
    sigma=0.1,     # quality observations carry Gaussian noise
    seed=2024,
    trajectory_stride=100,
)
result = run(config)

print(f"operator            : {config.operator}")
print(f"converged           : {result.converged}")
print(f"convergence iteration: {result.convergence_iteration}")
print()
print("iteration   Bel(s1)   Bel(s2)   Bel(s3)   Pl(s3)")
for i, t in enumerate(result.trajectory_iterations):
    b = result.trajectory_bel[i]
    print(
        f"{t:9d}   {b[0]:7.4f}   {b[1]:7.4f}   {b[2]:7.4f}"
        f"   {result.trajectory_pl_best[i]:6.4f}"
    )

# At the steady state every agent holds the categorical belief {s3}:1, so
# belief and plausibility coincide.
distinct = {str(m) for m in result.steady_state}
print(f"\ndistinct steady-state beliefs: {distinct}")
