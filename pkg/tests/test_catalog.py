from __future__ import annotations

from fractions import Fraction
from math import gcd, prod

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fano2ray.catalog import (
    SOLID_CANDIDATES,
    anticanonical_cube,
    family,
    fano_index,
    load_catalog,
    monomial_support,
    parse_ambient_monomial,
    weighted_degree,
    well_form_weights,
)


def brute_support(weights, degree):
    # independent enumeration with explicit nested ranges
    out = set()
    w0, w1, w2, w3, w4 = weights
    for e0 in range(degree // w0 + 1):
        for e1 in range((degree - e0 * w0) // w1 + 1):
            for e2 in range((degree - e0 * w0 - e1 * w1) // w2 + 1):
                for e3 in range((degree - e0 * w0 - e1 * w1 - e2 * w2) // w3 + 1):
                    rest = degree - e0 * w0 - e1 * w1 - e2 * w2 - e3 * w3
                    if rest % w4 == 0:
                        out.add((e0, e1, e2, e3, rest // w4))
    return out


def test_load_catalog_shape():
    records = load_catalog()
    assert len(records) == 35
    assert [r.id for r in records] == list(range(96, 131))


def test_table_rows():
    r100 = family(100)
    assert r100.weights == (1, 2, 3, 5, 9)
    assert r100.degree == 18
    assert r100.index == 2
    assert r100.rational is False
    r130 = family(130)
    assert r130.weights == (3, 4, 5, 6, 7)
    assert r130.degree == 12
    assert r130.index == 13
    assert r130.rational is True


def test_fano_index_examples():
    assert fano_index((1, 2, 3, 5, 9), 18) == 2
    assert fano_index((1, 1, 1, 1, 1), 2) == 3
    assert fano_index((3, 4, 5, 6, 7), 12) == 13


def test_fano_index_validation():
    with pytest.raises(ValueError):
        fano_index((1, 2, 3), 4)
    with pytest.raises(ValueError):
        fano_index((1, 1, 1, 1, 1), 0)


def test_stored_index_matches_recomputation():
    for r in load_catalog():
        assert fano_index(r.weights, r.degree) == r.index
        assert r.index >= 2


def test_anticanonical_cube_examples():
    # oracle: direct exact evaluation from the table data
    for fid, expected in ((100, Fraction(8, 15)), (110, Fraction(27, 40)), (96, Fraction(24))):
        r = family(fid)
        oracle = Fraction(r.index**3 * r.degree, prod(r.weights))
        assert oracle == expected
        assert anticanonical_cube(r) == expected


def test_cube_below_one_exactly_for_solid_candidates():
    small = {r.id for r in load_catalog() if anticanonical_cube(r) < 1}
    assert small == set(SOLID_CANDIDATES)


def test_monomial_support_counts_and_members():
    assert len(monomial_support((1, 1, 1, 1, 1), 2)) == 15
    sup = monomial_support((1, 2, 3, 5, 9), 18)
    assert (0, 0, 1, 3, 0) in sup  # x2*x3^3
    assert (0, 0, 0, 0, 2) in sup  # x4^2
    assert monomial_support((1, 2, 3, 5, 9), 1) == frozenset({(1, 0, 0, 0, 0)})
    assert monomial_support((1, 2, 3, 5, 9), -1) == frozenset()


@pytest.mark.parametrize("fid", [100, 101, 102, 103, 110, 122])
def test_monomial_support_against_brute_force(fid):
    r = family(fid)
    assert set(monomial_support(r.weights, r.degree)) == brute_support(r.weights, r.degree)


def test_well_form_weights_examples():
    assert well_form_weights((1, 3, 5, 1, 1)) == (1, 1, 1, 3, 5)
    assert well_form_weights((7, 21, 7, 14, 7)) == (1, 1, 1, 2, 3)
    assert well_form_weights((2, 4, 6)) == (1, 2, 3)


def test_catalog_weights_are_well_formed():
    for r in load_catalog():
        assert well_form_weights(r.weights) == r.weights


@given(st.lists(st.integers(min_value=1, max_value=40), min_size=3, max_size=6))
def test_well_form_weights_properties(ws):
    formed = well_form_weights(tuple(ws))
    assert list(formed) == sorted(formed)
    # every subset omitting one entry is coprime
    for i in range(len(formed)):
        assert gcd(*(w for j, w in enumerate(formed) if j != i)) == 1
    # idempotent, and insensitive to a global scale
    assert well_form_weights(formed) == formed
    assert well_form_weights(tuple(7 * w for w in ws)) == formed


def test_expected_key_monomials_consistent_ones_in_support():
    # every degree-consistent recorded key monomial lies in the support;
    # the inconsistent ones are the known flagged entries
    flagged = set()
    for r in load_catalog():
        sup = r.support()
        for exc in r.expected.exclusions:
            for text in exc.keys:
                for part in text.split("+"):
                    mono = parse_ambient_monomial(part)
                    if weighted_degree(r.weights, mono) == r.degree:
                        assert mono in sup
                    else:
                        flagged.add((r.id, part))
    assert flagged == {
        (100, "x4*x2^2"),
        (101, "x2^3*x4"),
        (103, "x1^9*x4"),
        (103, "x1^13*x0"),
    }
