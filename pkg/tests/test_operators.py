import math

import numpy as np
import pytest

from interpol_lab.errors import ArgumentError, SingularOperatorError
from interpol_lab.functors import FunctorFamily, FunctorSpec, calderon_complex_space
from interpol_lab.operators import (
    CoupleOperator,
    GammaBound,
    gamma_lower_bound,
    interpolated_operator_norm,
    invert,
    inverse_norm,
    is_invertible,
    is_order_isomorphism,
    is_positive,
    operator_norm,
    resolvent_profile,
    spectrum,
)
from interpol_lab.spaces import BanachCouple, WeightedSpace

INF = math.inf


def space(p, w):
    return WeightedSpace(p, np.asarray(w, float))


def unweighted_couple(dim, p=2.0):
    X = space(p, np.ones(dim))
    return BanachCouple(X, X)


def op(mat, dom=None, cod=None):
    mat = np.asarray(mat, dtype=complex)
    dom = dom or unweighted_couple(mat.shape[1])
    cod = cod or unweighted_couple(mat.shape[0])
    return CoupleOperator(mat, dom, cod)


# ------------------------------------------------------------ operator norms


def test_identity_norm_is_one():
    X = space(2.0, [1.0, 1.0])
    r = operator_norm(np.eye(2), X, X)
    assert r.is_exact and r.value == pytest.approx(1.0, abs=1e-15)


def test_diag_l1_norm():
    X = space(1.0, [1.0, 1.0])
    r = operator_norm(np.diag([2.0, 3.0]), X, X)
    assert r.method == "exact-1"
    assert r.value == pytest.approx(3.0, abs=0)


def test_permutation_l2_norm():
    X = space(2.0, [1.0, 1.0])
    r = operator_norm(np.array([[0, 1], [1, 0]]), X, X)
    assert r.method == "exact-2-spectral"
    assert r.value == pytest.approx(1.0, rel=1e-14)


def test_norm_shape_mismatch():
    X = space(2.0, [1.0, 1.0])
    with pytest.raises(ArgumentError):
        operator_norm(np.ones((3, 2)), X, X)


def test_exact_norms_dominate_vector_samples():
    rng = np.random.default_rng(1)
    for p in (1.0, 2.0, INF):
        A = space(p, np.exp(rng.uniform(-2, 2, 4)))
        B = space(p, np.exp(rng.uniform(-2, 2, 4)))
        M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        r = operator_norm(M, A, B)
        assert r.is_exact
        sup = 0.0
        cands = [rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(60)]
        cands.extend(np.eye(4))  # columns attain the p = 1 norm
        if p == 2.0:
            scaled = B.weights[:, None] * M / A.weights[None, :]
            cands.append(np.conj(np.linalg.svd(scaled)[2][0]) / A.weights)
        for x in cands:
            sup = max(sup, B.norm(M @ x) / A.norm(x))
        assert sup <= r.value * (1 + 1e-12)
        if p in (1.0, 2.0):
            assert sup == pytest.approx(r.value, rel=1e-9)  # attained


def test_bracket_norm_sound_for_general_p():
    rng = np.random.default_rng(3)
    A = space(1.5, np.exp(rng.uniform(-1, 1, 3)))
    B = space(4.0, np.exp(rng.uniform(-1, 1, 3)))
    M = rng.normal(size=(3, 3))
    r = operator_norm(M, A, B)
    assert r.method == "iterative-bracket"
    assert r.bracket.lower <= r.bracket.upper
    assert r.bracket.upper <= 1.5 * r.bracket.lower  # bracket is usefully tight
    sup = 0.0
    for _ in range(200):
        x = rng.normal(size=3) + 1j * rng.normal(size=3)
        sup = max(sup, B.norm(M @ x) / A.norm(x))
    assert sup <= r.bracket.upper * (1 + 1e-12)


def test_couple_norm_and_cache():
    C = unweighted_couple(2)
    T = op(np.diag([2.0, 0.5]))
    b = T.couple_norm()
    assert b.upper == pytest.approx(2.0, rel=1e-14)
    again = T.endpoint_norm(0)
    assert again.value == pytest.approx(2.0, rel=1e-14)


# ----------------------------------------------------------------- inversion


def test_invert_identity():
    T = op(np.eye(2))
    Ti = invert(T)
    assert np.allclose(Ti.matrix, np.eye(2))
    g = gamma_lower_bound(T, T.domain.space0, T.codomain.space0)
    assert not g.singular
    assert g.bracket.contains(1.0, slack=1e-12)


def test_invert_diag_norms():
    T = op(np.diag([2.0, 0.5]))
    r = inverse_norm(T, T.codomain.space0, T.domain.space0)
    assert r.value == pytest.approx(2.0, rel=1e-14)
    g = gamma_lower_bound(T, T.domain.space0, T.codomain.space0)
    assert g.bracket.contains(0.5, slack=1e-12)


def test_invert_singular_fails():
    T = op(np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert not is_invertible(T)
    with pytest.raises(SingularOperatorError) as ei:
        invert(T)
    assert ei.value.sigma_min == pytest.approx(0.0, abs=1e-15)
    g = gamma_lower_bound(T, T.domain.space0, T.codomain.space0)
    assert g.singular and g.bracket.upper == 0.0


def test_inverse_norm_product_at_least_one():
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = rng.integers(2, 5)
        M = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        C = BanachCouple(
            space(2.0, np.exp(rng.uniform(-2, 2, d))),
            space(2.0, np.exp(rng.uniform(-2, 2, d))),
        )
        T = CoupleOperator(M, C, C)
        if not is_invertible(T):
            continue
        fwd = operator_norm(M, C.space0, C.space0).value
        bwd = inverse_norm(T, C.space0, C.space0).value
        assert fwd * bwd >= 1.0 - 1e-10


# -------------------------------------------------------------- interpolated


def test_interpolation_log_convexity_p2():
    rng = np.random.default_rng(7)
    dom = BanachCouple(space(2.0, [1.0, 1.0]), space(2.0, [math.e**2, math.e**-2]))
    M = rng.normal(size=(2, 2))
    n0 = operator_norm(M, dom.space0, dom.space0).value
    n1 = operator_norm(M, dom.space1, dom.space1).value
    for th in (0.25, 0.5, 0.75):
        spec = FunctorSpec("calderon", th)
        r = interpolated_operator_norm(M, dom, dom, spec)
        assert r.value <= n0 ** (1 - th) * n1**th * (1 + 1e-12)


def test_real_interpolated_norm_upper():
    dom = unweighted_couple(2)
    M = np.diag([3.0, 0.2])
    spec = FunctorSpec("real", 0.3, 2.0)
    r = interpolated_operator_norm(M, dom, dom, spec)
    assert r.bracket.upper == pytest.approx(3.0, rel=1e-14)


# ----------------------------------------------------- spectrum & resolvent


def test_spectrum_diag():
    T = op(np.diag([1.0, 2.0]))
    assert np.allclose(spectrum(T), [1.0, 2.0])


def test_spectrum_nilpotent():
    T = op(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert np.allclose(spectrum(T), [0.0, 0.0])


def test_spectrum_invariant_across_functors():
    rng = np.random.default_rng(11)
    d = 3
    C = BanachCouple(
        space(2.0, np.exp(rng.uniform(-1, 1, d))),
        space(2.0, np.exp(rng.uniform(-1, 1, d))),
    )
    M = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    T = CoupleOperator(M, C, C)
    eig = spectrum(T)
    # the matrix, hence its eigenvalues, never changes with theta or family
    for th in (0.1, 0.5, 0.9):
        S = calderon_complex_space(C, th)
        assert np.allclose(spectrum(CoupleOperator(M, BanachCouple(S, S), BanachCouple(S, S))), eig)


def test_resolvent_norm_normal_matrix_unweighted():
    T = op(np.diag([1.0, 2.0]))
    prof = resolvent_profile(T, [3.0], [0.5], FunctorFamily("calderon"))
    assert not prof.infinite[0, 0]
    assert prof.upper[0, 0] == pytest.approx(1.0, rel=1e-12)  # 1/dist(3, {1,2})
    assert prof.lower[0, 0] <= 1.0 + 1e-12


def test_resolvent_flags_eigenvalues():
    T = op(np.diag([1.0, 2.0]))
    prof = resolvent_profile(T, [2.0], [0.3], FunctorFamily("calderon"))
    assert prof.infinite[0, 0]


def test_resolvent_dominates_spectral_distance():
    rng = np.random.default_rng(13)
    d = 3
    C = BanachCouple(
        space(2.0, np.exp(rng.uniform(-1, 1, d))),
        space(2.0, np.exp(rng.uniform(-1, 1, d))),
    )
    M = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    T = CoupleOperator(M, C, C)
    eig = spectrum(T)
    lams = [0.5 + 0.5j, -1.0, 3.0]
    prof = resolvent_profile(T, lams, [0.2, 0.8], FunctorFamily("real", 2.0))
    for i, lam in enumerate(lams):
        dist = np.min(np.abs(eig - lam))
        for k in range(2):
            if not prof.infinite[i, k]:
                assert prof.upper[i, k] >= 1.0 / dist * (1 - 1e-9)


# ----------------------------------------------------------------- positivity


def test_identity_is_order_isomorphism():
    assert is_positive(np.eye(3))
    assert is_order_isomorphism(np.eye(3))


def test_symmetric_positive_entries_but_not_order_iso():
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert is_positive(M)
    assert not is_order_isomorphism(M)  # inverse has negative entries


def test_permutation_is_order_isomorphism():
    P = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    assert is_order_isomorphism(P)


def test_complex_entries_are_not_positive():
    assert not is_positive(np.array([[1.0 + 1e-6j, 0], [0, 1.0]]))
    assert is_positive(np.array([[1.0 + 0j, 0], [0, 1.0]]))
