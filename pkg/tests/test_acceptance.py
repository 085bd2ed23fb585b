"""Acceptance criteria, one test per criterion. Each prints a PASS/FAIL line."""

import itertools
import json
import random
import time

import pytest

from derived_intersect.cech import ProjProduct, bott_dims, line_bundle_dims
from derived_intersect.cli import SUITES, main
from derived_intersect.complexes import formality_report, verify_splitting_identity
from derived_intersect.ext import bott_oracle_totals, degeneration_check, end_complex, named_ci
from derived_intersect.graded import GradedIdeal, GradedRing, Polynomial, check_regular_sequence
from derived_intersect.hkr import FAILS, analyze_embedding, build_embedding

WINDOW = 12


@pytest.fixture(scope="module")
def segre_report():
    start = time.perf_counter()
    rep = analyze_embedding(build_embedding(ProjProduct((1, 1)), (1, 2)), WINDOW, grid=(-5, 5))
    return rep, time.perf_counter() - start


def test_criterion_1_segre_cohomology(segre_report, report_criterion):
    rep, seconds = segre_report
    ok = (
        rep["h_pullback_cotangent"] == [0, 1, 0]
        and rep["h_pullback_cotangent_les"] == [0, 1, 0]
        and rep["h_omega_X"][1] == 2
        and rep["stability"]["stable"] is True
        and seconds < 300
    )
    detail = (
        f"H(i*Omega_P5) = {rep['h_pullback_cotangent']}, h1(Omega_X) = {rep['h_omega_X'][1]}, "
        f"window {WINDOW} doubled, {seconds:.1f}s"
    )
    assert report_criterion(1, ok, detail)


def test_criterion_2_alpha_and_verdict(segre_report, report_criterion):
    rep, _ = segre_report
    grid = rep["grid_check"]
    ok = (
        rep["alpha"]["ell"]["zero"] is True
        and rep["alpha"]["det_conormal"]["zero"] is False
        and rep["det_conormal"] == [-4, -10]
        and rep["condition_star"]["verdict"] == FAILS
        and rep["eta_kernel_is_span_c1_ell"] is True
        and grid["grid"] == [-5, 5]
        and grid["zero_iff_multiple_of_ell"]
        and grid["additive"]
    )
    detail = (
        f"alpha_O(1,2) = 0: {rep['alpha']['ell']['zero']}, "
        f"alpha_O(-4,-10) = {[str(x) for x in rep['alpha']['det_conormal']['coordinates']]}, "
        f"det E = O{tuple(rep['det_conormal'])}, verdict {rep['condition_star']['verdict']}, "
        f"ker eta = span c1(O(1,2)) on {grid['points']} grid points"
    )
    assert report_criterion(2, ok, detail)


SHAPES = [(n, c) for n in (2, 3, 4) for c in range(1, min(3, n) + 1)]


def random_regular_sequence(rng: random.Random, nvars: int, ngens: int):
    """Rejection sampling: random graded sequences of this shape until one is regular."""
    while True:
        ring = GradedRing.standard(["x", "y", "z", "w"][:nvars])
        gens = []
        for _ in range(ngens):
            deg = rng.randint(1, 3)
            basis = ring.monomial_basis((deg,))
            poly = Polynomial.zero(nvars)
            for mono in rng.sample(basis, min(len(basis), rng.randint(1, 3))):
                poly = poly + Polynomial.monomial(mono, rng.choice([-3, -2, -1, 1, 2, 3]))
            gens.append(poly)
        if any(g.is_zero() for g in gens):
            continue
        ideal = GradedIdeal(ring, tuple(gens), declared_regular=True)
        if check_regular_sequence(ideal, 8)[0]:
            return ideal


def test_criterion_3_formality_random_ci(report_criterion):
    rng = random.Random(20240611)
    ideals = [random_regular_sequence(rng, *SHAPES[i % len(SHAPES)]) for i in range(12)]
    failures = []
    for ideal in ideals:
        rep = formality_report(ideal, window=8)
        c = rep["checks"]
        if not (
            rep["formal"]
            and c["tor_dims_match_exterior"]
            and c["restricted_tensor_differentials_vanish"]
            and c["epsilon_chain_map"]
        ):
            failures.append(ideal.format())
    shapes = sorted({(ideal.ring.nvars, len(ideal.generators)) for ideal in ideals})
    detail = f"{len(ideals) - len(failures)}/{len(ideals)} random regular sequences formal at window 8, shapes {shapes}"
    if failures:
        detail += f", failing {failures}"
    assert report_criterion(3, not failures and len(ideals) >= 10, detail)


def test_criterion_4_splitting(report_criterion):
    results = {(d, odd): verify_splitting_identity(d, 4, odd) for d in (1, 2, 3) for odd in (False, True)}
    ok = all(results.values())
    detail = f"dim V <= 3, word length <= 4, both parities: {sum(results.values())}/{len(results)} cases"
    assert report_criterion(4, ok, detail)


def test_criterion_5_cech_bott(report_criterion):
    space = ProjProduct((1, 1))
    bad = []
    stable = True
    for a, b in itertools.product(range(-5, 6), repeat=2):
        dims, cert = line_bundle_dims(space, (a, b), WINDOW, stability_check=True)
        stable = stable and cert["stable"] is True
        if dims != bott_dims(space, (a, b)):
            bad.append((a, b))
    ok = not bad and stable
    detail = f"121 bundles O(a,b), a,b in [-5,5]: {121 - len(bad)} match Bott, doubling stable: {stable}"
    assert report_criterion(5, ok, detail)


GOLDEN = {"diagonal": [1, 3, 0], "conic": [1, 5, 0], "point": [1, 2, 1]}


def test_criterion_6_degeneration(report_criterion):
    parts = []
    ok = True
    for name, golden in GOLDEN.items():
        oracle = bott_oracle_totals(name)
        if oracle != golden:
            ok = False
            parts.append(f"{name}: oracle {oracle} disagrees with {golden}")
            continue
        ci = named_ci(name)
        differentials_live = all(m.entries for m in end_complex(ci).maps.values())
        rep = degeneration_check(ci, WINDOW, stability_check=True)
        agree = rep["ext_dims"] == golden and rep["hkr_totals"] == golden and rep["degenerates"]
        agree = agree and differentials_live
        ok = ok and agree and rep["stability"]["stable"] is True
        parts.append(f"{name} Ext {rep['ext_dims']} HKR {rep['hkr_totals']}")
    assert report_criterion(6, ok, "; ".join(parts))


def _suite_json(capsys, suite, jobs):
    code = main(["verify", suite, "--window", "6", "--json", "--jobs", str(jobs)])
    return code, capsys.readouterr().out


def test_criterion_7_determinism(capsys, report_criterion):
    differing = []
    for suite in SUITES:
        serial = _suite_json(capsys, suite, 1)
        parallel = _suite_json(capsys, suite, 2)
        if serial != parallel or serial[0] != 0 or not json.loads(serial[1])["results"]["pass"]:
            differing.append(suite)
    ok = not differing
    detail = f"{len(SUITES) - len(differing)}/{len(SUITES)} suites byte-identical serial vs --jobs 2 (window 6)"
    assert report_criterion(7, ok, detail)
