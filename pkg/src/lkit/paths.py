"""Continuous deformations t -> Omega_t of a real (k,k)-form ending at omega^k."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exterior import Form, kahler_power, wedge_all

__all__ = ["DeformationPath", "affine_path", "constant_path", "kahler_tuple_path", "custom_path"]


@dataclass(frozen=True)
class DeformationPath:
    kind: str
    n: int
    k: int
    evaluate: Callable[[float], Form] = field(repr=False)
    start: Form | None = field(default=None, repr=False)
    end: Form | None = field(default=None, repr=False)
    data: dict = field(default_factory=dict, repr=False)

    def __call__(self, t: float) -> Form:
        return self.evaluate(t)

    @property
    def is_affine(self) -> bool:
        return self.kind == "affine"

    def lipschitz(self) -> float | None:
        """Exact Lipschitz constant of t -> Omega_t in coefficient norm (affine only)."""
        if not self.is_affine:
            return None
        return (self.end - self.start).norm()

    def modulus_of_continuity(self, grid: Sequence[float]) -> float:
        """Largest sampled difference quotient over consecutive grid points."""
        vals = [self.evaluate(t).coeffs for t in grid]
        best = 0.0
        for (t0, a), (t1, b) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
            best = max(best, float(np.linalg.norm(b - a)) / (t1 - t0))
        return best

    def endpoint_error(self, Omega: Form | None = None) -> float:
        """max of ||evaluate(1) - omega^k|| and, if given, ||evaluate(0) - Omega||."""
        err = (self.evaluate(1.0) - kahler_power(self.k, self.n)).norm()
        if Omega is not None:
            err = max(err, (self.evaluate(0.0) - Omega).norm())
        return err


def affine_path(start: Form, end: Form | None = None) -> DeformationPath:
    """(1-t)*start + t*end; ``end`` defaults to omega^k."""
    if start.p != start.q:
        raise ValueError("deformations run through (k,k)-forms")
    n, k = start.n, start.p
    if end is None:
        end = kahler_power(k, n)
    if end.bidegree != start.bidegree:
        raise ValueError("endpoints must share a bidegree")

    def evaluate(t):
        return Form(n, k, k, (1.0 - t) * start.coeffs + t * end.coeffs)

    return DeformationPath("affine", n, k, evaluate, start, end)


def constant_path(Omega: Form) -> DeformationPath:
    return affine_path(Omega, Omega)


def kahler_tuple_path(factors: Sequence[Form]) -> DeformationPath:
    """Omega_t = wedge_i ((1-t) omega_i + t omega) for (1,1)-forms omega_i."""
    if not factors:
        raise ValueError("need at least one factor")
    n = factors[0].n
    omega = kahler_power(1, n)
    factors = tuple(factors)

    def evaluate(t):
        return wedge_all([(1.0 - t) * f + t * omega for f in factors])

    return DeformationPath("kahler_tuple", n, len(factors), evaluate,
                           start=wedge_all(list(factors)), end=kahler_power(len(factors), n),
                           data={"factors": factors})


def custom_path(fn: Callable[[float], Form], n: int, k: int, **data) -> DeformationPath:
    return DeformationPath("custom", n, k, fn, data=dict(data))
