"""Independent reference computations used to derive frozen test values.

Nothing here calls the structure tables of the package: monomials are
expanded into explicit lists of differentials and sorted by bubble sort,
counting transpositions.
"""
import numpy as np

from lkit.exterior import Form, basis, basis_index, conjugate


def _differentials(I, J):
    return [(0, i) for i in I] + [(1, j) for j in J]


def _bubble_sign(seq):
    seq = list(seq)
    sign = 1
    for end in range(len(seq) - 1, 0, -1):
        for i in range(end):
            if seq[i] > seq[i + 1]:
                seq[i], seq[i + 1] = seq[i + 1], seq[i]
                sign = -sign
    return sign, seq


def monomial_product(n, key_a, key_b):
    """(sign, key) with e_a ^ e_b = sign * e_key, or (0, None) on collision."""
    seq = _differentials(*key_a) + _differentials(*key_b)
    if len(set(seq)) < len(seq):
        return 0, None
    sign, ordered = _bubble_sign(seq)
    I = tuple(i for kind, i in ordered if kind == 0)
    J = tuple(j for kind, j in ordered if kind == 1)
    return sign, (I, J)


def oracle_wedge(a: Form, b: Form) -> Form:
    n = a.n
    p, q = a.p + b.p, a.q + b.q
    out = np.zeros(len(basis(n, p, q)), dtype=complex)
    idx = basis_index(n, p, q)
    for ka, ca in a.terms():
        for kb, cb in b.terms():
            s, key = monomial_product(n, ka, kb)
            if s:
                out[idx[key]] += s * ca * cb
    return Form(n, p, q, out)


def oracle_top(eta: Form) -> complex:
    n = eta.n
    return eta.coeffs[0] / (1j ** (n * n))


def oracle_gram(Omega: Form, p: int, q: int) -> np.ndarray:
    """H[a, b] from the defining formula with every wedge expanded by hand."""
    n = Omega.n
    keys = basis(n, p, q)
    s = p + q
    c = 1j ** (q - p) * (-1) ** (s * (s + 1) // 2)
    H = np.zeros((len(keys), len(keys)), dtype=complex)
    for a, ka in enumerate(keys):
        for b, (I, J) in enumerate(keys):
            # conj(dz_I ^ dzb_J) = dzb_I ^ dz_J, reordered by the oracle
            sign, ordered = _bubble_sign([(1, i) for i in I] + [(0, j) for j in J])
            conj_key = (tuple(i for k, i in ordered if k == 0), tuple(j for k, j in ordered if k == 1))
            ea = Form.from_terms(n, p, q, {ka: 1})
            eb_bar = Form.from_terms(n, q, p, {conj_key: sign})
            H[a, b] = c * oracle_top(oracle_wedge(oracle_wedge(ea, eb_bar), Omega))
    return H


def random_form(rng, n, p, q, density=1.0):
    dim = len(basis(n, p, q))
    c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    if density < 1:
        c = c * (rng.random(dim) < density)
    return Form(n, p, q, c)


def random_real_form(rng, n, k):
    f = random_form(rng, n, k, k)
    return 0.5 * (f + conjugate(f))
