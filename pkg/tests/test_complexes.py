import pytest
from hypothesis import given, settings, strategies as st

from derived_intersect.complexes import (
    epsilon_chain_map,
    exterior_prediction,
    formality_report,
    homology_dims,
    koszul_complex,
    permutation_sign,
    restrict_to_X,
    shuffle_map,
    shuffle_product,
    splitting_map,
    symmetrization_eps,
    symmetrize,
    tensor_complex,
    tor_algebra,
    verify_eps_chain_map,
    verify_formality_ci,
    verify_splitting_identity,
)
from derived_intersect.errors import WindowError
from derived_intersect.graded import GradedIdeal, GradedRing, QuotientRing
from derived_intersect.linalg import SparseMatrix, rank

R3 = GradedRing.standard(["x", "y", "z"])
CI_CASES = [["x"], ["x", "y"], ["x^2", "y*z"], ["x*y - z^2"], ["x^2 + y^2", "x*z"]]


def ci(gens, ring=R3):
    return GradedIdeal.parse(ring, gens, declared_regular=True)


@pytest.mark.parametrize(
    "seq, sign", [((0, 1, 2), 1), ((1, 0, 2), -1), ((2, 0, 1), 1), ((2, 1, 0), -1), ((), 1)]
)
def test_permutation_sign(seq, sign):
    assert permutation_sign(seq) == sign


@pytest.mark.parametrize("gens", CI_CASES)
def test_koszul_d_squared_and_exactness(gens):
    I = ci(gens)
    K = koszul_complex(R3, list(I.generators))
    K.check_d_squared(R3.degrees_up_to(6))
    dims = homology_dims(K, 6)
    Q = QuotientRing(R3, I)
    for (k, d), n in dims.items():
        assert n == (Q.dim(d) if k == 0 else 0)


def test_koszul_of_non_regular_sequence_has_homology():
    I = GradedIdeal.parse(R3, ["x*y", "x*z"])
    K = koszul_complex(R3, list(I.generators))
    dims = homology_dims(K, 4)
    assert any(n for (k, _), n in dims.items() if k == 1)


@pytest.mark.parametrize("gens", [["x"], ["x", "y"], ["x^2", "y*z"]])
def test_tensor_complex_is_exact_above_zero(gens):
    I = ci(gens)
    T = tensor_complex(I, window=5)
    T.check_d_squared(R3.degrees_up_to(5))
    dims = homology_dims(T, 5, indices=range(1, 5))
    assert all(n == 0 for n in dims.values())


@pytest.mark.parametrize("gens", CI_CASES)
def test_restricted_tensor_complex_has_zero_differentials(gens):
    I = ci(gens)
    T = restrict_to_X(tensor_complex(I, window=5), I)
    assert T.differentials_vanish(R3.degrees_up_to(5))


@pytest.mark.parametrize("gens", CI_CASES)
def test_epsilon_is_a_chain_map(gens):
    assert verify_eps_chain_map(ci(gens), window=6)


def test_epsilon_without_signs_is_not_a_chain_map():
    I = ci(["x", "y"])
    eps = epsilon_chain_map(I, window=4)
    eps.components[2] = {key: -val if val.terms[(0, 0, 0)] < 0 else val for key, val in eps.components[2].items()}
    assert not eps.commutes(R3.degrees_up_to(4))


@pytest.mark.parametrize("odd", [True, False])
def test_shuffle_is_associative_and_graded_commutative(odd):
    for u in [(0,), (1, 0), ()]:
        for v in [(1,), (0, 0)]:
            for w in [(0, 1), (1,)]:
                left = {}
                for a, x in shuffle_product(u, v, odd).items():
                    for b, y in shuffle_product(a, w, odd).items():
                        left[b] = left.get(b, 0) + x * y
                right = {}
                for a, x in shuffle_product(v, w, odd).items():
                    for b, y in shuffle_product(u, a, odd).items():
                        right[b] = right.get(b, 0) + x * y
                assert {k: c for k, c in left.items() if c} == {k: c for k, c in right.items() if c}
            sign = (-1) ** (len(u) * len(v)) if odd else 1
            uv = shuffle_product(u, v, odd)
            vu = shuffle_product(v, u, odd)
            assert uv == {k: sign * c for k, c in vu.items()}


word = st.lists(st.integers(0, 2), max_size=3).map(tuple)


@settings(max_examples=80, deadline=None)
@given(word, word, word, st.booleans())
def test_shuffle_associativity_property(u, v, w, odd):
    def mul(a, b):
        out = {}
        for x, cx in a.items():
            for y, cy in b.items():
                for z, cz in shuffle_product(x, y, odd).items():
                    out[z] = out.get(z, 0) + cx * cy * cz
        return {k: c for k, c in out.items() if c}

    assert mul(mul({u: 1}, {v: 1}), {w: 1}) == mul({u: 1}, mul({v: 1}, {w: 1}))


@settings(max_examples=60, deadline=None)
@given(word, word, st.booleans())
def test_splitting_is_multiplicative_property(u, w, odd):
    lhs = splitting_map(shuffle_product(u, w, odd), odd)
    pu, pw = splitting_map({u: 1}, odd), splitting_map({w: 1}, odd)
    rhs = {}
    for a, x in pu.items():
        for b, y in pw.items():
            prod = splitting_map(symmetrize(a + b, odd), odd)
            # symmetrize then split is the identity on S(V), so this is a*b in S(V)
            for m, c in prod.items():
                rhs[m] = rhs.get(m, 0) + x * y * c
    rhs = {k: c for k, c in rhs.items() if c}
    assert lhs == rhs


@pytest.mark.parametrize("odd", [True, False])
@pytest.mark.parametrize("dim", [1, 2, 3])
def test_splitting_identity(dim, odd):
    assert verify_splitting_identity(dim, 4, odd)


def test_shuffle_map_shape_and_symmetrization_rank():
    m = shuffle_map(1, 1, odd=True, dim=2)
    assert (m.rows, m.cols) == (4, 4)
    assert rank(m) == 1
    eps = symmetrization_eps(2, odd=False, dim=2)
    assert rank(eps) == 3
    assert rank(symmetrization_eps(3, odd=True, dim=2)) == 0


def test_symmetrization_factors_through_shuffles():
    # eps(v0 v1) = v0 * v1 under the odd shuffle product
    assert symmetrize((0, 1), True) == shuffle_product((0,), (1,), True)


@pytest.mark.parametrize("gens", CI_CASES)
def test_tor_dims_match_exterior(gens):
    I = ci(gens)
    tor = tor_algebra(I, window=6, products=False)
    pred = exterior_prediction(I, 6)
    assert {k: n for k, n in tor.dims.items() if n} == {k: n for k, n in pred.items() if n}


def test_tor_total_dims_point_in_p2():
    tor = tor_algebra(ci(["x", "y"]), window=4)
    # R/I = k[z]: two generators times one monomial in each degree 1..4
    assert tor.total_dims()[1] == 8
    # the product Tor_1 x Tor_1 -> Tor_2 hits the top class
    m = tor.products[((1, (1,)), (1, (1,)))]
    assert isinstance(m, SparseMatrix) and rank(m) == 1


@pytest.mark.parametrize("gens", CI_CASES)
def test_formality_report(gens):
    rep = formality_report(ci(gens), window=5)
    assert rep["formal"], rep["checks"]
    assert verify_formality_ci(ci(gens), window=5)


def test_non_regular_sequence_is_not_formal_ci():
    I = GradedIdeal.parse(R3, ["x*y", "x*z"], declared_regular=True)
    rep = formality_report(I, window=4)
    assert not rep["checks"]["regular"]
    assert not rep["formal"]


def test_homology_window_error():
    I = ci(["x^3"])
    with pytest.raises(WindowError) as exc:
        homology_dims(koszul_complex(R3, list(I.generators)), 2)
    assert exc.value.suggested_window == 3


def test_tensor_complex_of_a_square():
    R = GradedRing.standard(["x", "y"])
    I = ci(["x^2"], R)
    T = tensor_complex(I, window=8)
    assert [len(T.terms[k]) for k in range(4)] == [1, 1, 1, 1]
    over_thickening = homology_dims(T, 8, indices=range(0, 4))
    restricted = homology_dims(restrict_to_X(T, I), 8, indices=range(0, 4))
    Q = QuotientRing(R, I)
    for (k, d), n in over_thickening.items():
        assert n == (Q.dim(d) if k == 0 else 0)
    # on X the differentials vanish and H_k is R/I shifted by 2k
    for (k, d), n in restricted.items():
        assert n == (Q.dim((d[0] - 2 * k,)) if d[0] >= 2 * k else 0)


def test_tensor_complex_ranks_grow_like_powers():
    T = tensor_complex(ci(["x", "y"]), window=4)
    assert [len(T.terms[k]) for k in range(5)] == [1, 2, 4, 8, 16]
    K = koszul_complex(R3, list(ci(["x", "y"]).generators))
    assert [len(K.terms[k]) for k in range(3)] == [1, 2, 1]
