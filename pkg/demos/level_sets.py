"""
Level sets along a direction
============================

Sweep level-set diameters for x^2 exp(-x) when only rightward moves are allowed.
"""
from dirwell import certificates as cert
from dirwell.catalog import catalog_problem
from dirwell.sampling import sample_directional_region

# the region is everything left of the anchor 1/2
p = catalog_problem("x2exp")
cloud = sample_directional_region(p)
print("points:", len(cloud.points), "spacing:", cloud.spacing)

sweep = cert.diameter_sweep(p, "L", cert.DEFAULT_SCHEDULE, cloud)
for e, d in zip(sweep.epsilons, sweep.diameters):
    print(f"eps={e:8.0e}  diam={d:.4f}  cube-root bound={2 * e ** (1 / 3):.4f}")
print("verdict:", sweep.verdict)

# the same question asked through the growth profile at the minimizer
at_min = sample_directional_region(p, anchor=[0.0])
prof = cert.c_profile(p, "c0", ts=[0.1, 0.5, 1.0], cloud=at_min)
print("c0:", dict(zip(prof.ts, prof.c_values)), prof.verdict)

# a double well never shrinks to one point
report = cert.wellposedness_report(catalog_problem("doublewell"))
print("doublewell:", report.overall)
