"""Step sizes that are safe for binomial boosting can break poisson boosting.

The engine scales updates by inverse block Gram matrices. That is a
valid curvature bound for the binomial loss at any step size in (0, 1]
(its weights never exceed a quarter), but the poisson weights grow with
the fit, so a fixed step can stop bounding the curvature mid-run: the
parameters start oscillating or blow up.
"""

from amboost import (
    BoostConfig,
    binomial,
    divergence_detector,
    hessian_ub_check,
    make_partition,
    poisson,
    run_boost,
    singleton_blocks,
)
from amboost.experiments import synth_glm_data

for family, spec in (("binomial", binomial()), ("poisson", poisson())):
    X, y = synth_glm_data(100, 2, 0.5, (3.0, -2.0), family, seed=5)
    part = make_partition(X, singleton_blocks(2))
    print(f"{family} boosting, 1000 component-wise iterations:")
    for nu in (0.02, 0.03, 0.04, 0.05, 0.06, 0.07):
        cfg = BoostConfig(nu=nu, max_iter=1000, mode="greedy",
                          divergence_guard=True)
        path = run_boost(part, spec, y, cfg)
        verdict = divergence_detector(path, window=20)
        curv = hessian_ub_check(spec, part, nu, path)
        note = "curvature bound holds" if curv.ok else (
            f"bound first violated at k={curv.first_violation[0]}"
        )
        print(f"  nu={nu:.2f}: {verdict:<11s} ({note})")
    print()

print("every run whose curvature bound held throughout also converged;")
print("shrinking the step restores the bound at the cost of more iterations.")
