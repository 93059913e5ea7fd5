"""
An Ekeland walk
===============

Start far from the minimum of x^2 exp(-x) and follow the halving iteration.
"""
import numpy as np

from dirwell.catalog import catalog_problem
from dirwell.ekeland import ekeland_point, verify_ekeland
from dirwell.oracle import oracle_ekeland
from dirwell.sampling import sample_directional_region

p = catalog_problem("x2exp")
cloud = sample_directional_region(p)

res = ekeland_point(p, [-1.0], 3.0, cloud)
for x, f in zip(res.iterates, res.values):
    print(f"x={x[0]:+.4f}  f={f:.5f}")

check = verify_ekeland(res, p, cloud)
print("residuals:", check["residual_i"], check["residual_ii"])
print("violations:", check["violations_iii"])

# brute force agrees that such a point exists
print("oracle:", oracle_ekeland(p, [-1.0], 3.0))
print("steps:", np.diff(np.array(res.iterates)[:, 0]))
