from math import comb, factorial

import numpy as np
import pytest

from lkit.exterior import Bidegree, Form, conjugate, kahler_power, monomial, wedge
from lkit.operators import (
    HermitianForm,
    classical_lefschetz_decompose,
    classical_primitive_basis,
    gram_Q,
    image,
    kernel,
    min_singular_value,
    primitive_basis,
    q_sign,
    signature,
    top_scalar,
    wedge_operator,
)

from oracles import oracle_gram, oracle_wedge, random_form, random_real_form


def test_wedge_operator_matches_wedge(rng):
    for n in range(1, 5):
        for _ in range(10):
            p, q, a, b = rng.integers(0, n + 1, size=4)
            phi = random_form(rng, n, a, b)
            A = wedge_operator(phi, (p, q))
            x = random_form(rng, n, p, q)
            ref = oracle_wedge(phi, x)
            assert A.target == ref.bidegree
            np.testing.assert_allclose(A(x).coeffs, ref.coeffs, atol=1e-12)


def test_wedge_operator_rejects_wrong_source():
    A = wedge_operator(kahler_power(1, 3), (1, 0))
    with pytest.raises(ValueError):
        A(monomial(3, (), (1,)))


def test_omega_squared_on_scalars_n2():
    A = wedge_operator(kahler_power(2, 2), (0, 0))
    assert A.is_square
    assert min_singular_value(A) == pytest.approx(2.0)


def test_top_scalar():
    # omega^n = n! times the unit volume form
    for n in range(1, 5):
        assert top_scalar(kahler_power(n, n)) == pytest.approx(factorial(n))
    with pytest.raises(ValueError):
        top_scalar(kahler_power(1, 3))


def test_q_sign_values():
    assert q_sign(0, 0) == 1
    assert q_sign(1, 1) == -1
    assert q_sign(1, 0) == pytest.approx(1j)
    assert q_sign(0, 1) == pytest.approx(-1j)


def test_gram_matrix_n2_constant_one():
    H = gram_Q(Form.scalar(2), 1, 1).matrix
    expected = np.array([[0, 0, 0, -1], [0, 1, 0, 0], [0, 0, 1, 0], [-1, 0, 0, 0]])
    np.testing.assert_allclose(H, expected, atol=1e-14)
    np.testing.assert_allclose(H, oracle_gram(Form.scalar(2), 1, 1), atol=1e-14)


def test_q_of_omega_n2():
    w = kahler_power(1, 2)
    assert gram_Q(Form.scalar(2), 1, 1)(w, w) == pytest.approx(-2)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gram_matches_oracle_on_random_real_forms(rng, n):
    for p in range(n + 1):
        for q in range(n + 1 - p):
            Omega = random_real_form(rng, n, n - p - q)
            H = gram_Q(Omega, p, q).matrix
            np.testing.assert_allclose(H, oracle_gram(Omega, p, q), atol=1e-10)
            np.testing.assert_allclose(H, H.conj().T, atol=1e-12)


def test_gram_is_sesquilinear(rng):
    n, p, q = 3, 1, 1
    Omega = random_real_form(rng, n, 1)
    Q = gram_Q(Omega, p, q)
    a, b, c = (random_form(rng, n, p, q) for _ in range(3))
    z = 0.3 - 1.2j
    assert Q(z * a + c, b) == pytest.approx(z * Q(a, b) + Q(c, b))
    assert Q(a, z * b) == pytest.approx(np.conj(z) * Q(a, b))
    assert Q(b, a) == pytest.approx(np.conj(Q(a, b)))


def test_gram_rejects_non_real():
    with pytest.raises(ValueError, match="not real"):
        gram_Q(monomial(3, (1,), (2,)), 1, 1)
    with pytest.raises(ValueError):
        gram_Q(kahler_power(1, 3), 0, 0)


def test_hermitian_form_validates():
    with pytest.raises(ValueError):
        HermitianForm(Bidegree(1, 0, 2), [[1, 1], [0, 1]])
    with pytest.raises(ValueError):
        HermitianForm(Bidegree(1, 0, 2), np.eye(3))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_classical_primitive_dimensions(n):
    for p in range(n + 1):
        for q in range(n + 1 - p):
            expected = comb(n, p) * comb(n, q) - (comb(n, p - 1) * comb(n, q - 1) if p and q else 0)
            assert classical_primitive_basis(n, p, q).dim == expected
            assert primitive_basis(kahler_power(n - p - q, n), p, q).dim == expected


def test_lefschetz_decomposition_of_e11():
    a = monomial(2, (1,), (1,))
    pieces = dict(classical_lefschetz_decompose(a))
    beta, gamma = pieces[0], pieces[1]
    np.testing.assert_allclose(beta.coeffs, [0.5, 0, 0, -0.5], atol=1e-12)
    np.testing.assert_allclose(gamma.coeffs, [-0.5j], atol=1e-12)


def test_lefschetz_decomposition_reconstructs(rng):
    for n in range(1, 5):
        for _ in range(5):
            a, b = rng.integers(0, n + 1, size=2)
            if a + b > n:
                continue
            alpha = random_form(rng, n, a, b)
            total = Form.zero(n, a, b)
            for j, g in classical_lefschetz_decompose(alpha):
                total = total + wedge(kahler_power(j, n), g)
                assert wedge(g, kahler_power(n - g.p - g.q + 1, n)).norm() < 1e-10
            assert total.allclose(alpha, atol=1e-10)


def test_kernel_and_image_are_orthonormal(rng):
    A = rng.standard_normal((5, 3)) @ rng.standard_normal((3, 7))
    K, S = kernel(A), image(A)
    assert K.shape == (7, 4) and S.shape == (5, 3)
    np.testing.assert_allclose(K.conj().T @ K, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(A @ K, 0, atol=1e-10)
    np.testing.assert_allclose(S.conj().T @ S, np.eye(3), atol=1e-12)


def test_signature_counts():
    assert signature(np.diag([2.0, -1.0, 1e-14])) == (1, 1, 1)
    assert signature(np.zeros((0, 0))) == (0, 0, 0)


def test_min_singular_value_edge_cases():
    assert min_singular_value(np.zeros((2, 3))) == 0.0
    assert min_singular_value(np.zeros((0, 0))) == float("inf")


def test_conjugate_commutes_with_omega_operator(rng):
    n = 3
    a = random_form(rng, n, 1, 0)
    w = kahler_power(1, n)
    assert conjugate(wedge(w, a)).allclose(wedge(w, conjugate(a)), atol=1e-12)
