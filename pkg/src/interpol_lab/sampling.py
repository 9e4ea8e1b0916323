"""Seeded random instances shared by the check suites and the CLI."""

from __future__ import annotations

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from .operators import CoupleOperator
from .spaces import INF, BanachCouple, WeightedSpace

DEFAULT_PS = (1.0, 2.0, INF)


def random_space(rng, dim: int, p: float, weight_span: float) -> WeightedSpace:
    return WeightedSpace(p, np.exp(rng.uniform(-weight_span, weight_span, dim)))


def random_couple(
    rng,
    dim: Optional[int] = None,
    dims: Tuple[int, int] = (2, 6),
    ps: Sequence[float] = DEFAULT_PS,
    weight_span: float = 3.0,
) -> BanachCouple:
    """A couple with one exponent shared by both spaces (keeps the lattice
    norms exactly computable) and independent log-uniform weights."""
    if dim is None:
        dim = int(rng.integers(dims[0], dims[1] + 1))
    p = ps[int(rng.integers(0, len(ps)))]
    return BanachCouple(
        random_space(rng, dim, p, weight_span), random_space(rng, dim, p, weight_span)
    )


def random_invertible_instance(
    rng,
    dims: Tuple[int, int] = (2, 6),
    ps: Sequence[float] = DEFAULT_PS,
    weight_span: float = 4.0,
    gate: float = 1e-6,
) -> CoupleOperator:
    """A random invertible operator between couples sharing dim and exponent."""
    dim = int(rng.integers(dims[0], dims[1] + 1))
    p = ps[int(rng.integers(0, len(ps)))]
    dom = BanachCouple(
        random_space(rng, dim, p, weight_span), random_space(rng, dim, p, weight_span)
    )
    cod = BanachCouple(
        random_space(rng, dim, p, weight_span), random_space(rng, dim, p, weight_span)
    )
    while True:
        M = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        sv = np.linalg.svd(M, compute_uv=False)
        if sv[-1] > gate * sv[0]:
            return CoupleOperator(M, dom, cod)


def random_endomorphism_instance(
    rng,
    dims: Tuple[int, int] = (2, 6),
    ps: Sequence[float] = DEFAULT_PS,
    weight_span: float = 2.0,
    gate: float = 1e-6,
) -> CoupleOperator:
    """A random invertible operator from a couple to itself."""
    C = random_couple(rng, dims=dims, ps=ps, weight_span=weight_span)
    dim = C.dim
    while True:
        M = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        sv = np.linalg.svd(M, compute_uv=False)
        if sv[-1] > gate * sv[0]:
            return CoupleOperator(M, C, C)


def random_positive_instance(
    rng,
    dims: Tuple[int, int] = (2, 5),
    weight_span: float = 2.0,
    diag_dominance: float = 1.0,
) -> CoupleOperator:
    """A positive invertible operator between p = 2 lattice couples."""
    dim = int(rng.integers(dims[0], dims[1] + 1))
    dom = BanachCouple(
        random_space(rng, dim, 2.0, weight_span), random_space(rng, dim, 2.0, weight_span)
    )
    cod = BanachCouple(
        random_space(rng, dim, 2.0, weight_span), random_space(rng, dim, 2.0, weight_span)
    )
    while True:
        M = rng.uniform(0.0, 1.0, (dim, dim)) + diag_dominance * dim * np.eye(dim)
        sv = np.linalg.svd(M, compute_uv=False)
        if sv[-1] > 1e-6 * sv[0]:
            return CoupleOperator(M, dom, cod)


def random_monomial_instance(
    rng, dims: Tuple[int, int] = (2, 5), weight_span: float = 2.0
) -> CoupleOperator:
    """Weighted permutation: a genuine lattice order isomorphism."""
    dim = int(rng.integers(dims[0], dims[1] + 1))
    dom = BanachCouple(
        random_space(rng, dim, 2.0, weight_span), random_space(rng, dim, 2.0, weight_span)
    )
    cod = BanachCouple(
        random_space(rng, dim, 2.0, weight_span), random_space(rng, dim, 2.0, weight_span)
    )
    perm = rng.permutation(dim)
    M = np.zeros((dim, dim))
    for i, j in enumerate(perm):
        M[j, i] = math.exp(rng.uniform(-1.5, 1.5))
    return CoupleOperator(M, dom, cod)


def random_vector(rng, dim: int) -> np.ndarray:
    return rng.normal(size=dim) + 1j * rng.normal(size=dim)
