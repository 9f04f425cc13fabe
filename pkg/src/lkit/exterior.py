"""Exterior algebra of constant-coefficient (p,q)-forms on C^n.

A (p,q)-form is stored as a dense complex vector over the lex-ordered basis
of monomials ``dz_I ^ dzb_J`` with ``|I| = p`` and ``|J| = q``.  Inside a
monomial all holomorphic differentials precede the antiholomorphic ones.
Indices are 1-based, as in ``dz_1, ..., dz_n``.
"""
from __future__ import annotations

import json
import math
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Bidegree",
    "Form",
    "FormParseError",
    "basis",
    "basis_index",
    "wedge",
    "wedge_all",
    "conjugate",
    "is_real",
    "kahler_power",
    "hermitian_form",
    "coefficient_matrix",
    "monomial",
    "from_differentials",
    "serialize",
    "parse",
    "form_to_dict",
    "form_from_dict",
    "DEFAULT_EPS",
]

DEFAULT_EPS = 1e-12


class Bidegree(NamedTuple):
    p: int
    q: int
    n: int

    @property
    def valid(self) -> bool:
        return 0 <= self.p <= self.n and 0 <= self.q <= self.n

    @property
    def dim(self) -> int:
        """C(n,p)*C(n,q), or 0 outside the range where the space is nonzero."""
        if not self.valid:
            return 0
        return comb(self.n, self.p) * comb(self.n, self.q)

    def shifted(self, dp: int, dq: int) -> "Bidegree":
        return Bidegree(self.p + dp, self.q + dq, self.n)


@lru_cache(maxsize=None)
def basis(n: int, p: int, q: int) -> tuple:
    """Lex-ordered basis keys ``(I, J)`` of V^{p,q}; empty for the zero space."""
    if not (0 <= p <= n and 0 <= q <= n):
        return ()
    rng = range(1, n + 1)
    return tuple((I, J) for I in combinations(rng, p) for J in combinations(rng, q))


@lru_cache(maxsize=None)
def basis_index(n: int, p: int, q: int) -> dict:
    return {key: i for i, key in enumerate(basis(n, p, q))}


def _inversions(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(1 for x in a for y in b if x > y)


def _mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@lru_cache(maxsize=None)
def _wedge_table(n: int, pa: int, qa: int, pb: int, qb: int):
    """Sparse structure tensor of V^{pa,qa} x V^{pb,qb} -> V^{pa+pb,qa+qb}.

    Row ``o * dim_b + j``, column ``i`` holds the sign s with
    ``e_i ^ f_j = s * g_o``.  Multiplying by a coefficient vector of the left
    factor and reshaping gives the matrix of left multiplication.
    """
    A, B = basis(n, pa, qa), basis(n, pb, qb)
    out_index = basis_index(n, pa + pb, qa + qb)
    dim_b = len(B)
    if not A or not B or not out_index:
        return sp.csr_matrix((len(out_index) * dim_b, len(A)), dtype=float)
    b_masks = [(_mask(Ib), _mask(Jb)) for Ib, Jb in B]
    rows, cols, vals = [], [], []
    for i, (Ia, Ja) in enumerate(A):
        ma, na = _mask(Ia), _mask(Ja)
        for j, (Ib, Jb) in enumerate(B):
            mb, nb = b_masks[j]
            if ma & mb or na & nb:
                continue
            # move dz_Ib left past dzb_Ja, then sort both halves
            inv = len(Ja) * len(Ib) + _inversions(Ia, Ib) + _inversions(Ja, Jb)
            o = out_index[(tuple(sorted(Ia + Ib)), tuple(sorted(Ja + Jb)))]
            rows.append(o * dim_b + j)
            cols.append(i)
            vals.append(-1.0 if inv % 2 else 1.0)
    shape = (len(out_index) * dim_b, len(A))
    return sp.csr_matrix((vals, (rows, cols)), shape=shape)


@lru_cache(maxsize=None)
def _conjugation_perm(n: int, p: int, q: int) -> np.ndarray:
    """perm[a] = index in V^{q,p} of the swapped key (J, I) of basis element a."""
    target = basis_index(n, q, p)
    return np.array([target[(J, I)] for I, J in basis(n, p, q)], dtype=int)


class FormParseError(ValueError):
    """Malformed form text; the message names the offending location."""


class Form:
    """A (p,q)-form with complex coefficients in the canonical monomial basis.

    Instances are treated as immutable: the coefficient array is read-only.
    """

    __slots__ = ("n", "p", "q", "coeffs")

    def __init__(self, n: int, p: int, q: int, coeffs=None):
        self.n, self.p, self.q = int(n), int(p), int(q)
        dim = Bidegree(self.p, self.q, self.n).dim
        if coeffs is None:
            arr = np.zeros(dim, dtype=complex)
        else:
            arr = np.array(coeffs, dtype=complex).reshape(-1)
            if arr.shape[0] != dim:
                raise ValueError(
                    f"expected {dim} coefficients for V^({p},{q}) on C^{n}, got {arr.shape[0]}")
        arr.setflags(write=False)
        self.coeffs = arr

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, n: int, p: int, q: int) -> "Form":
        return cls(n, p, q)

    @classmethod
    def scalar(cls, n: int, c: complex = 1.0) -> "Form":
        return cls(n, 0, 0, [c])

    @classmethod
    def from_terms(cls, n: int, p: int, q: int, terms) -> "Form":
        """Build from a mapping or iterable of ``((I, J), coefficient)``.

        ``I`` and ``J`` must already be strictly increasing.
        """
        index = basis_index(n, p, q)
        arr = np.zeros(len(index), dtype=complex)
        items = terms.items() if hasattr(terms, "items") else terms
        for (I, J), c in items:
            key = (tuple(I), tuple(J))
            if key not in index:
                raise ValueError(f"{key} is not a basis monomial of V^({p},{q}) on C^{n}")
            arr[index[key]] += c
        return cls(n, p, q, arr)

    # -- structure ----------------------------------------------------------
    @property
    def bidegree(self) -> Bidegree:
        return Bidegree(self.p, self.q, self.n)

    @property
    def degree(self) -> int:
        return self.p + self.q

    def coefficient(self, I, J) -> complex:
        idx = basis_index(self.n, self.p, self.q).get((tuple(I), tuple(J)))
        return 0j if idx is None else complex(self.coeffs[idx])

    def terms(self):
        """Nonzero ``((I, J), c)`` pairs in lex order."""
        keys = basis(self.n, self.p, self.q)
        return [(keys[i], complex(self.coeffs[i])) for i in np.flatnonzero(self.coeffs)]

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def normalized(self, eps: float = DEFAULT_EPS) -> "Form":
        c = np.where(np.abs(self.coeffs) < eps, 0, self.coeffs)
        return Form(self.n, self.p, self.q, c)

    def allclose(self, other: "Form", atol: float = 1e-10, rtol: float = 0.0) -> bool:
        self._check_compatible(other)
        scale = max(self.norm(), other.norm())
        return bool(np.linalg.norm(self.coeffs - other.coeffs) <= atol + rtol * scale)

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def conjugate(self) -> "Form":
        return conjugate(self)

    # -- arithmetic ---------------------------------------------------------
    def _check_compatible(self, other: "Form"):
        if not isinstance(other, Form):
            raise TypeError(f"expected Form, got {type(other).__name__}")
        if (self.n, self.p, self.q) != (other.n, other.p, other.q):
            raise ValueError(
                f"bidegree mismatch: {self.bidegree} vs {other.bidegree}")

    def __add__(self, other):
        self._check_compatible(other)
        return Form(self.n, self.p, self.q, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_compatible(other)
        return Form(self.n, self.p, self.q, self.coeffs - other.coeffs)

    def __neg__(self):
        return Form(self.n, self.p, self.q, -self.coeffs)

    def __mul__(self, c):
        if isinstance(c, Form):
            return NotImplemented
        return Form(self.n, self.p, self.q, self.coeffs * complex(c))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return Form(self.n, self.p, self.q, self.coeffs / complex(c))

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return ((self.n, self.p, self.q) == (other.n, other.p, other.q)
                and np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({c:.6g})*{_monomial_str(I, J)}" for (I, J), c in self.terms()[:6])
        if len(self.terms()) > 6:
            body += " + ..."
        return f"Form(n={self.n}, ({self.p},{self.q}): {body or '0'})"


def _monomial_str(I, J) -> str:
    parts = [f"dz{i}" for i in I] + [f"dzb{j}" for j in J]
    return "^".join(parts) if parts else "1"


def wedge(a: Form, b: Form) -> Form:
    """Exterior product ``a ^ b``."""
    if a.n != b.n:
        raise ValueError(f"forms live on different spaces: n={a.n} vs n={b.n}")
    n = a.n
    out = Bidegree(a.p + b.p, a.q + b.q, n)
    if out.dim == 0 or a.coeffs.size == 0 or b.coeffs.size == 0:
        return Form(n, out.p, out.q)
    table = _wedge_table(n, a.p, a.q, b.p, b.q)
    left = (table @ a.coeffs).reshape(out.dim, b.coeffs.size)
    return Form(n, out.p, out.q, left @ b.coeffs)


def wedge_all(forms: Sequence[Form], n: int | None = None) -> Form:
    """Left-to-right wedge of a sequence; the empty product is the scalar 1."""
    if not forms:
        if n is None:
            raise ValueError("empty product needs n")
        return Form.scalar(n)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def conjugate(a: Form) -> Form:
    if a.coeffs.size == 0:
        return Form(a.n, a.q, a.p)
    out = np.zeros(a.coeffs.size, dtype=complex)
    sign = -1.0 if (a.p * a.q) % 2 else 1.0
    out[_conjugation_perm(a.n, a.p, a.q)] = sign * np.conj(a.coeffs)
    return Form(a.n, a.q, a.p, out)


def is_real(a: Form, tol: float = 1e-10) -> bool:
    if a.p != a.q:
        raise ValueError(f"reality is defined for (k,k)-forms, got ({a.p},{a.q})")
    return bool(np.linalg.norm(a.coeffs - conjugate(a).coeffs) <= tol)


def kahler_power(k: int, n: int) -> Form:
    """omega^k for the standard Kahler form omega = i * sum_j dz_j ^ dzb_j."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > n:
        return Form(n, k, k)
    c = factorial(k) * 1j ** (k * k % 4)
    keys = basis(n, k, k)
    return Form(n, k, k, [c if I == J else 0 for I, J in keys])


def hermitian_form(h) -> Form:
    """The (1,1)-form ``i * sum h_jl dz_j ^ dzb_l`` of an n x n matrix."""
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    if h.shape != (n, n):
        raise ValueError("expected a square matrix")
    # V^{1,1} lex order is exactly row-major order of (j, l)
    return Form(n, 1, 1, 1j * h.reshape(-1))


def coefficient_matrix(a: Form) -> np.ndarray:
    """Inverse of :func:`hermitian_form`: h with ``a = i * sum h_jl dz_j ^ dzb_l``."""
    if (a.p, a.q) != (1, 1):
        raise ValueError("coefficient matrix is defined for (1,1)-forms")
    return (a.coeffs / 1j).reshape(a.n, a.n)


def monomial(n: int, I=(), J=(), c: complex = 1.0) -> Form:
    I, J = tuple(I), tuple(J)
    return Form.from_terms(n, len(I), len(J), {(I, J): c})


def from_differentials(n: int, factors: Sequence[tuple[int, bool]], c: complex = 1.0) -> Form:
    """Wedge of differentials given in any order.

    ``factors`` is a sequence of ``(index, antiholomorphic)`` pairs, e.g.
    ``[(2, True), (3, False)]`` for ``dzb_2 ^ dz_3``.  The result is
    reordered into canonical form with the matching permutation sign.
    """
    keys = [(bool(anti), int(i)) for i, anti in factors]
    for _, i in keys:
        if not 1 <= i <= n:
            raise ValueError(f"index {i} out of range 1..{n}")
    I = tuple(sorted(i for anti, i in keys if not anti))
    J = tuple(sorted(i for anti, i in keys if anti))
    if len(set(I)) < len(I) or len(set(J)) < len(J):
        return Form(n, len(I), len(J))
    inv = sum(1 for x in range(len(keys)) for y in range(x + 1, len(keys)) if keys[x] > keys[y])
    return monomial(n, I, J, -c if inv % 2 else c)


# -- serialization -----------------------------------------------------------

def form_to_dict(a: Form) -> dict:
    return {
        "n": a.n,
        "p": a.p,
        "q": a.q,
        "terms": [
            {"I": list(I), "J": list(J), "re": c.real, "im": c.imag}
            for (I, J), c in a.terms()
        ],
    }


def serialize(a: Form, indent: int | None = None) -> str:
    return json.dumps(form_to_dict(a), indent=indent, allow_nan=False)


def _reject_constant(name):
    raise FormParseError(f"non-finite number {name}")


def _int_field(obj, key, where):
    v = obj.get(key) if isinstance(obj, dict) else None
    if isinstance(v, bool) or not isinstance(v, int):
        raise FormParseError(f"{where}.{key}: expected an integer")
    return v


def _index_list(raw, n, size, where):
    if not isinstance(raw, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in raw):
        raise FormParseError(f"{where}: expected a list of integers")
    if len(raw) != size:
        raise FormParseError(f"{where}: expected {size} indices, got {len(raw)}")
    for x in raw:
        if not 1 <= x <= n:
            raise FormParseError(f"{where}: index out of range ({x} not in 1..{n})")
    if any(b <= a for a, b in zip(raw, raw[1:])):
        raise FormParseError(f"{where}: indices not increasing")
    return tuple(raw)


def _real_field(term, key, where):
    v = term.get(key, 0.0)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FormParseError(f"{where}.{key}: expected a number")
    if not math.isfinite(v):
        raise FormParseError(f"{where}.{key}: non-finite number")
    return float(v)


def form_from_dict(obj, where: str = "form") -> Form:
    if not isinstance(obj, dict):
        raise FormParseError(f"{where}: expected an object")
    n = _int_field(obj, "n", where)
    p = _int_field(obj, "p", where)
    q = _int_field(obj, "q", where)
    if n < 0:
        raise FormParseError(f"{where}.n: must be nonnegative")
    if not (0 <= p <= n and 0 <= q <= n):
        raise FormParseError(f"{where}: bidegree ({p},{q}) out of range for n={n}")
    terms = obj.get("terms")
    if not isinstance(terms, list):
        raise FormParseError(f"{where}.terms: expected a list")
    index = basis_index(n, p, q)
    arr = np.zeros(len(index), dtype=complex)
    seen = set()
    for t, term in enumerate(terms):
        loc = f"{where}.terms[{t}]"
        if not isinstance(term, dict):
            raise FormParseError(f"{loc}: expected an object")
        I = _index_list(term.get("I"), n, p, loc + ".I")
        J = _index_list(term.get("J"), n, q, loc + ".J")
        if (I, J) in seen:
            raise FormParseError(f"{loc}: duplicate term {I},{J}")
        seen.add((I, J))
        arr[index[(I, J)]] = complex(_real_field(term, "re", loc), _real_field(term, "im", loc))
    return Form(n, p, q, arr)


def parse(text: str) -> Form:
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return form_from_dict(obj)
