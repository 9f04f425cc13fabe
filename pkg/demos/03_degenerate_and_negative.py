"""Where the certificate breaks down.

A decomposable (2,2)-form kills dz1 ^ dzb1, so the r=0 map is singular and a
coordinate 2-plane shows it is not strictly positive.  The straight path from
-omega^2 passes through zero at t = 1/2, and the affine certificate reports
the failure there.

Run: python demos/03_degenerate_and_negative.py
"""
from lkit import check_star_at, is_hodge_riemann, kahler_power, monomial, strict_positivity_check

Omega = monomial(4, (1, 2), (1, 2))
print("r=0 check on e({1,2},{1,2}):", check_star_at(Omega, 1, 1, 0))
res = strict_positivity_check(Omega, m=20)
print("strict positivity:", res.verdict, "on frame columns", res.frame.real.T.tolist())

cert = is_hodge_riemann(-kahler_power(2, 4), 1, 1)
print("-omega^2:", cert.verdict, "first failure (t, r, sigma) =", cert.failure)

cert = is_hodge_riemann(kahler_power(2, 4), 1, 1)
print("omega^2:", cert.verdict, "Lipschitz bounds", cert.lipschitz)
