"""Products of Kahler forms along the factor-wise path to omega^k.

Every sampled product should satisfy the invertibility condition at all grid
points and be positive on its primitive subspace.  The script prints the
smallest singular value seen for each r.

Run: python demos/02_timorin_products.py
"""
import numpy as np

from lkit import certify_path, check_primitive_positivity, sample_kahler, timorin_product

rng = np.random.default_rng(7)
n, k = 4, 2
p, q = 1, 1
for trial in range(5):
    Omega, path = timorin_product([sample_kahler(n, rng) for _ in range(k)])
    cert = certify_path(path, p, q, delta=1 / 32)
    pos = check_primitive_positivity(Omega, p, q)
    margins = {r: f"{cert.min_margin(r):.3g}" for r in cert.margins}
    print(f"trial {trial}: {cert.verdict:12s} sigma_min by r {margins}  lambda_min {pos.lambda_min:.3g}")
