from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from derived_intersect.cech import (
    CechModel,
    LineBundleSum,
    Morphism,
    ProjProduct,
    SheafMap,
    SheafPresentation,
    ShortExactSequence,
    bott_dims,
    c1_class,
    cech_cohomology,
    cech_dims,
    connecting_map,
    cotangent_data,
    induced_on_cohomology,
    kunneth_coordinates,
    line_bundle_dims,
    required_window,
)
from derived_intersect.errors import ExactnessError, WindowError
from derived_intersect.graded import Polynomial
from derived_intersect.linalg import rank

P1 = ProjProduct.parse("P1")
P2 = ProjProduct.parse("P2")
P1xP1 = ProjProduct.parse("P1xP1")


def var(space, i):
    return Polynomial.variable(i, space.nvars)


@pytest.mark.parametrize(
    "text, dims", [("P1", (1,)), ("P2", (2,)), ("P1xP1", (1, 1)), ("P1 x P2", (1, 2)), ("P2*P1*P1", (2, 1, 1))]
)
def test_parse_space(text, dims):
    assert ProjProduct.parse(text).dims == dims


@pytest.mark.parametrize("text", ["", "Q2", "P", "P1xx"])
def test_parse_space_rejects_garbage(text):
    with pytest.raises(ValueError):
        ProjProduct.parse(text)


@pytest.mark.parametrize(
    "space, degree, expected",
    [
        (P1, (0,), [1, 0]),
        (P1, (2,), [3, 0]),
        (P1, (-2,), [0, 1]),
        (P1xP1, (-1, -2), [0, 0, 0]),
        (P1xP1, (0, 0), [1, 0, 0]),
        (P1, (3,), [4, 0]),
        (P1, (-1,), [0, 0]),
        (P1, (-4,), [0, 3]),
        (P2, (-3,), [0, 0, 1]),
        (P2, (2,), [6, 0, 0]),
        (P1xP1, (-2, 2), [0, 3, 0]),
        (P1xP1, (-2, -3), [0, 0, 2]),
    ],
)
def test_bott_formula_examples(space, degree, expected):
    assert bott_dims(space, degree) == expected
    dims, cert = line_bundle_dims(space, degree, window=6)
    assert dims == expected
    assert cert["stable"] and cert["mode"] == "weight-blocks"


@settings(max_examples=25, deadline=None)
@given(st.integers(-5, 5), st.integers(-5, 5))
def test_cech_matches_bott_on_p1xp1(a, b):
    dims, _ = line_bundle_dims(P1xP1, (a, b), window=6, stability_check=False)
    assert dims == bott_dims(P1xP1, (a, b))


@pytest.mark.parametrize("space, expected", [(P1, [0, 1]), (P2, [0, 1, 0]), (P1xP1, [0, 2, 0])])
def test_cotangent_sheaf_dims(space, expected):
    omega, *_ = cotangent_data(space)
    dims, cert = cech_dims(space, omega, window=4)
    assert dims == expected and cert["stable"]


def test_window_below_bott_bound_is_rejected():
    with pytest.raises(WindowError) as exc:
        line_bundle_dims(P1, (-6,), window=1)
    assert exc.value.suggested_window == 5
    assert required_window(P1xP1, [(-5, 2), (0, -7)]) == 6
    # at the bound itself weight blocks are already exact
    assert line_bundle_dims(P1, (-6,), window=5, stability_check=False)[0] == [0, 5]


def test_c1_classes_are_additive_and_kunneth():
    omega, *_ = cotangent_data(P1xP1)
    model = CechModel(P1xP1, 6, [omega])
    for a, b in [(1, 0), (0, 1), (2, -3), (-1, -1), (0, 0)]:
        assert kunneth_coordinates(model, omega, (a, b)) == [Fraction(a), Fraction(b)]
    h = c1_class(model, omega, (1, 0))
    assert not h.is_zero()
    assert c1_class(model, omega, (0, 0)).is_zero()


def test_cohomology_basis_size_matches_dims():
    sheaf = SheafPresentation.line_bundles(P1xP1, [(-2, 1)])
    dim, basis, _ = cech_cohomology(P1xP1, sheaf, 1, window=4)
    assert dim == 2 == len(basis)
    assert all(b.representative for b in basis)


def _euler_sequence_p1():
    A = LineBundleSum(P1, ((-2,),), "O(-2)")
    B = LineBundleSum(P1, ((-1,), (-1,)), "O(-1)^2")
    C = LineBundleSum(P1, ((0,),), "O")
    x0, x1 = var(P1, 0), var(P1, 1)
    inc = SheafMap.build(A, B, {(0, 0): -x1, (1, 0): x0})
    prj = SheafMap.build(B, C, {(0, 0): x0, (0, 1): x1})
    first, second, third = (SheafPresentation("sum", s, None, s.name) for s in (A, B, C))
    return ShortExactSequence(first, second, third, Morphism(first, second, inc), Morphism(second, third, prj))


def test_connecting_map_is_isomorphism_for_euler_sequence():
    ses = _euler_sequence_p1()
    model = CechModel(P1, 6, sequences=[ses])
    assert model.check_exact(ses)["exact"]
    delta = connecting_map(ses, 0, window=6)
    assert (delta.rows, delta.cols) == (1, 1)
    assert rank(delta) == 1


def test_connecting_map_vanishes_on_split_sequence():
    A = LineBundleSum(P1, ((-2,),), "A")
    B = LineBundleSum(P1, ((-2,), (0,)), "B")
    C = LineBundleSum(P1, ((0,),), "C")
    one = Polynomial.constant(1, 2)
    first, second, third = (SheafPresentation("sum", s, None, s.name) for s in (A, B, C))
    ses = ShortExactSequence(
        first,
        second,
        third,
        Morphism(first, second, SheafMap.build(A, B, {(0, 0): one})),
        Morphism(second, third, SheafMap.build(B, C, {(0, 1): one})),
    )
    delta = connecting_map(ses, 0, window=4)
    assert (delta.rows, delta.cols) == (1, 1)
    assert delta.is_zero()


def test_non_exact_sequence_is_detected():
    A = LineBundleSum(P1, ((-2,),), "A")
    B = LineBundleSum(P1, ((-1,), (-1,)), "B")
    C = LineBundleSum(P1, ((0,),), "C")
    x0, x1 = var(P1, 0), var(P1, 1)
    first, second, third = (SheafPresentation("sum", s, None, s.name) for s in (A, B, C))
    ses = ShortExactSequence(
        first,
        second,
        third,
        Morphism(first, second, SheafMap.build(A, B, {(0, 0): x1, (1, 0): x0})),
        Morphism(second, third, SheafMap.build(B, C, {(0, 0): x0, (0, 1): x1})),
    )
    model = CechModel(P1, 4, sequences=[ses])
    with pytest.raises(ExactnessError):
        model.check_exact(ses)


def test_induced_identity_and_zero_maps():
    S = SheafPresentation.line_bundles(P1xP1, [(-2, 0)])
    ident = Morphism(S, S, SheafMap.identity(S.ambient))
    m = induced_on_cohomology(ident, 1, window=4)
    assert (m.rows, m.cols) == (1, 1) and rank(m) == 1
    T = SheafPresentation.line_bundles(P1xP1, [(-1, 1)])
    mult = Morphism(S, T, SheafMap.build(S.ambient, T.ambient, {(0, 0): var(P1xP1, 0) * var(P1xP1, 2)}))
    # H^1(O(-1,1)) = 0, so the induced map is the zero map out of a line
    z = induced_on_cohomology(mult, 1, window=4)
    assert (z.rows, z.cols) == (0, 1)


def test_map_into_h0_from_zero_space():
    S = SheafPresentation.line_bundles(P1xP1, [(-2, 0)])
    T = SheafPresentation.line_bundles(P1xP1, [(0, 0)])
    sq = var(P1xP1, 0) * var(P1xP1, 0)
    m = induced_on_cohomology(Morphism(S, T, SheafMap.build(S.ambient, T.ambient, {(0, 0): sq})), 0, 4)
    assert (m.rows, m.cols) == (1, 0)


def test_c1_of_ell_and_det_are_independent():
    omega, *_ = cotangent_data(P1xP1)
    model = CechModel(P1xP1, 12, [omega])
    a = c1_class(model, omega, (1, 2)).coordinates
    b = c1_class(model, omega, (-4, -10)).coordinates
    assert a[0] * b[1] - a[1] * b[0] != 0


def test_multiplication_by_section_on_h1_p1():
    # x0 : O(-3) -> O(-2) sends H^1 (dim 2) onto H^1 (dim 1)
    S = SheafPresentation.line_bundles(P1, [(-3,)])
    T = SheafPresentation.line_bundles(P1, [(-2,)])
    m = induced_on_cohomology(Morphism(S, T, SheafMap.build(S.ambient, T.ambient, {(0, 0): var(P1, 0)})), 1, 4)
    assert (m.rows, m.cols) == (1, 2) and rank(m) == 1


def test_long_exact_sequence_ranks():
    ses = _euler_sequence_p1()
    model = CechModel(P1, 6, sequences=[ses])
    dims = {s: model.dims(s) for s in (ses.first, ses.second, ses.third)}
    chi = [sum((-1) ** k * n for k, n in enumerate(dims[s])) for s in (ses.first, ses.second, ses.third)]
    assert chi[1] == chi[0] + chi[2]


def test_sheaf_map_degree_validation():
    A = LineBundleSum(P1, ((0,),))
    B = LineBundleSum(P1, ((2,),))
    with pytest.raises(ValueError):
        SheafMap.build(A, B, {(0, 0): var(P1, 0)})
    with pytest.raises(IndexError):
        SheafMap.build(A, B, {(1, 0): var(P1, 0) * var(P1, 1)})
