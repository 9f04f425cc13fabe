"""Forms on C^2 and C^3: wedge products, the Kahler form and the pairing Q.

Run: python demos/01_classical_forms.py
"""
import numpy as np

from lkit import Form, gram_Q, kahler_power, monomial, signature_table, wedge
from lkit.operators import classical_lefschetz_decompose

# Differentials anticommute, so dzb1 ^ dz1 = -dz1 ^ dzb1.
dz1, dzb1 = monomial(2, (1,), ()), monomial(2, (), (1,))
print("dzb1 ^ dz1 =", wedge(dzb1, dz1))

# omega = i(dz1 dzb1 + dz2 dzb2); its square is twice the volume form.
omega = kahler_power(1, 2)
print("omega      =", omega)
print("omega^2    =", wedge(omega, omega))

# With Omega = 1 the pairing on (1,1)-forms has one negative direction, omega itself.
Q = gram_Q(Form.scalar(2), 1, 1)
print("Gram matrix of Q on V^{1,1}(C^2):\n", Q.matrix.real + 0.0)
print("Q(omega, omega) =", Q(omega, omega).real)
print("signatures r=0,1:", signature_table(Form.scalar(2), 1, 1))

# Split dz1 ^ dzb1 into a primitive part and a multiple of omega.
for j, piece in classical_lefschetz_decompose(monomial(2, (1,), (1,))):
    print(f"omega^{j} component:", {key: complex(np.round(c, 12)) for key, c in piece.terms()})
