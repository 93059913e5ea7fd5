"""
Relaxed variational inequalities
================================

Compare the two relaxed solution sets for a monotone affine field in the plane.
"""
from dirwell import vi
from dirwell.catalog import catalog_problem
from dirwell.sampling import sample_directional_region

p = catalog_problem("vi_psd_2")
cloud = sample_directional_region(p)
for eps in (1e-1, 1e-2):
    print(eps, vi.minty_details(p, eps, cloud).to_dict())

report = vi.vi_wellposedness_report(catalog_problem("vi_identity"))
print("verdict:", report.verdict, "clusters:", report.clusters)
