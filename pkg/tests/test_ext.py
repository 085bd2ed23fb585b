from fractions import Fraction

import pytest

from derived_intersect.cech import ProjProduct
from derived_intersect.errors import ConsistencyError, ParseError
from derived_intersect.ext import (
    GlobalCI,
    bott_oracle_totals,
    check_d_squared,
    check_regular,
    compose,
    degeneration_check,
    end_complex,
    ext_self,
    hkr_side,
    named_ci,
)

# totals of dim H^p(X, Lambda^q N) over p + q = n, from the closed formula on X
ORACLE = {"point": [1, 2, 1], "diagonal": [1, 3, 0], "conic": [1, 5, 0]}


@pytest.mark.parametrize("name", sorted(ORACLE))
def test_oracle_totals(name):
    assert bott_oracle_totals(name) == ORACLE[name]


@pytest.mark.parametrize("name", sorted(ORACLE))
def test_end_complex_squares_to_zero(name):
    E = end_complex(named_ci(name))
    check_d_squared(E)
    c = named_ci(name).codim
    assert sorted(E.nodes) == list(range(-c, c + 1))
    assert sum(len(E.nodes[n]) for n in E.nodes) == 4**c
    # negative Hom degrees must not leak floats into the signs
    assert all(type(x) is Fraction for m in E.maps.values() for _, p in m.entries for x in p.terms.values())


def test_broken_sign_breaks_d_squared():
    E = end_complex(named_ci("point"))
    n = 0
    m = E.maps[n]
    flipped = type(m)(m.source, m.target, tuple((k, -p if k[0] == 0 else p) for k, p in m.entries))
    assert compose(flipped, E.maps[n + 1]) or compose(E.maps[n - 1], flipped)
    E.maps[n] = flipped
    with pytest.raises(ConsistencyError):
        check_d_squared(E)


@pytest.mark.parametrize("name", sorted(ORACLE))
def test_hkr_side_matches_oracle(name):
    table, _ = hkr_side(named_ci(name), window=4)
    totals = [0, 0, 0]
    for q, row in table.items():
        for p, x in enumerate(row):
            if p + q < 3:
                totals[p + q] += x
    assert totals == ORACLE[name]


@pytest.mark.parametrize(
    "name, table",
    [
        ("diagonal", {0: [1, 0, 0], 1: [3, 0, 0]}),
        ("conic", {0: [1, 0, 0], 1: [5, 0, 0]}),
        ("point", {0: [1, 0, 0], 1: [2, 0, 0], 2: [1, 0, 0]}),
    ],
)
def test_hkr_tables(name, table):
    got, mode = hkr_side(named_ci(name), window=4)
    assert got == table


@pytest.mark.parametrize("name", ["point", "diagonal"])
def test_ext_dims(name):
    ext, _ = ext_self(named_ci(name), window=4)
    assert [ext.get(n, 0) for n in range(3)] == ORACLE[name]
    assert all(x == 0 for n, x in ext.items() if n < 0 or n > 2)


def test_degeneration_report_conic():
    rep = degeneration_check(named_ci("conic"), window=4)
    assert rep["ext_dims"] == rep["hkr_totals"] == [1, 5, 0]
    assert rep["degenerates"]
    assert rep["euler_characteristic"]["agree"]
    assert rep["stability"]["stable"]


def test_point_in_p2_is_not_named_but_works():
    ci = GlobalCI.parse(ProjProduct.parse("P2"), ["x0", "x1"])
    rep = degeneration_check(ci, window=3)
    assert rep["ext_dims"] == [1, 2, 1]
    assert rep["degenerates"]


def test_line_in_p2():
    ci = GlobalCI.parse(ProjProduct.parse("P2"), ["x0"])
    rep = degeneration_check(ci, window=3, stability_check=False)
    # Ext^n(O_L, O_L) on P2: H^0(O_L) + H^0(O_L(1)) = 1 + 2
    assert rep["ext_dims"] == [1, 2, 0]
    assert rep["hkr_table"]["1"] == [2, 0, 0]


def test_non_regular_sections_rejected():
    ci = GlobalCI.parse(ProjProduct.parse("P2"), ["x0*x1", "x0*x2"])
    with pytest.raises(ValueError):
        check_regular(ci)


@pytest.mark.parametrize("bad", [["x0 + x1^2"], ["0"], ["x0 +"]])
def test_bad_sections(bad):
    with pytest.raises((ParseError, ValueError)):
        GlobalCI.parse(ProjProduct.parse("P2"), bad)


def test_unknown_named_ci():
    with pytest.raises(ParseError):
        named_ci("cubic")
