import math
from itertools import combinations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fourmove import census_path
from fourmove.fpgroup import (
    Presentation,
    abelianization_invariants,
    build_Gk,
    build_Gnk,
    conjugator_words,
    cyclic_reduce,
    format_presentation,
    free_reduce,
    inverse,
    parse_presentation,
    relator_canonical_form,
    shortlex_key,
    smith_normal_form,
)
from fourmove.knotcodes import knot_presentation, parse_gauss_code

from conftest import FIGURE_EIGHT, TREFOIL, UNKNOT

FREE2 = Presentation(2, ())
INV3 = Presentation.involutive_group(3)


def test_free_reduce_examples():
    assert free_reduce((1, -1, 2), FREE2) == (2,)
    assert free_reduce((1, 1, 2), Presentation.involutive_group(2)) == (2,)
    assert free_reduce((), FREE2) == ()
    assert free_reduce((-1, 2, -2, 1, 2), FREE2) == (2,)
    # involutive letters are normalized to the positive letter
    assert free_reduce((-2, 1), Presentation.involutive_group(2)) == (2, 1)


def test_presentation_requires_squares_for_flags():
    with pytest.raises(ValueError, match="square"):
        Presentation(1, (), (True,))
    with pytest.raises(ValueError, match="outside"):
        Presentation(1, ((2,),))


def brute_conjugators(n, k):
    words = [w for m in range(k + 1) for w in product(range(1, n + 1), repeat=m)
             if all(a != b for a, b in zip(w, w[1:]))]
    return sorted(words, key=lambda w: (len(w), w))


def test_conjugator_examples():
    assert list(conjugator_words(3, 0)) == [()]
    assert list(conjugator_words(2, 2)) == [(), (1,), (2,), (1, 2), (2, 1)]
    assert list(conjugator_words(3, 1)) == [(), (1,), (2,), (3,)]


@pytest.mark.parametrize("n, k", [(1, 3), (2, 4), (3, 3), (4, 2)])
def test_conjugators_match_exhaustive_listing(n, k):
    assert list(conjugator_words(n, k)) == brute_conjugators(n, k)


def rotations_and_reversals(w, p):
    out = set()
    for v in (tuple(w), inverse(w, p)):
        out.update(v[i:] + v[:i] for i in range(len(v)))
    return out


def test_canonical_form_examples():
    assert relator_canonical_form((1, 2) * 4, INV3) == relator_canonical_form((2, 1) * 4, INV3)
    assert relator_canonical_form((1, 2, 1, 2), INV3) == relator_canonical_form((2, 1, 2, 1), INV3)
    abac, acab = (1, 2, 1, 3), (1, 3, 1, 2)
    assert acab in rotations_and_reversals(abac, INV3)
    assert relator_canonical_form(abac, INV3) == relator_canonical_form(acab, INV3)


words3 = st.lists(st.sampled_from([1, 2, 3, -1, -2, -3]), min_size=1, max_size=10)


@given(words3)
def test_canonical_form_invariance(w):
    p = Presentation(3, ())
    w = cyclic_reduce(w, p)
    if not w:
        return
    c = relator_canonical_form(w, p)
    variants = rotations_and_reversals(w, p)
    assert c in variants
    assert c == min(variants, key=shortlex_key)
    assert relator_canonical_form(c, p) == c
    for v in variants:
        assert relator_canonical_form(v, p) == c


def test_build_Gnk_small():
    assert build_Gnk(2, 0).relators == ((1, 1), (2, 2), (1, 2) * 4)
    assert build_Gnk(1, 0).relators == ((1, 1),)


def test_build_Gk_depth_zero():
    two = Presentation.involutive_group(2)
    assert build_Gk(two, 0).relators == ((1, 1), (2, 2), (1, 2) * 4)
    base = knot_presentation(parse_gauss_code(TREFOIL))
    added = build_Gk(base, 0).relators[len(base.relators):]
    assert sorted(added) == [(1, 2) * 4, (1, 3) * 4, (2, 3) * 4]


def test_diagonal_relators_included_for_nonempty_conjugators():
    p = build_Gnk(2, 1)
    keys = {relator_canonical_form(r, p) for r in p.relators}
    # (a . b a b)^4 with a = b = g1 and w = g2
    assert relator_canonical_form((1, 2, 1, 2) * 4, p) in keys
    assert not any(r == (1,) * 8 for r in p.relators)
    off = build_Gk(Presentation.involutive_group(2), 1, diagonal=False)
    assert len(off.relators) < len(p.relators)


@pytest.mark.parametrize("code", [TREFOIL, FIGURE_EIGHT])
def test_build_Gk_monotone_in_depth(code):
    base = knot_presentation(parse_gauss_code(code))
    prev = None
    for k in range(3):
        p = build_Gk(base, k)
        keys = {relator_canonical_form(r, p) for r in p.relators}
        assert len(keys) == len(p.relators)
        if prev is not None:
            assert prev <= keys
        prev = keys


@pytest.mark.parametrize("n, k", [(2, 2), (3, 2)])
def test_exponent_sums_are_even(n, k):
    for r in build_Gnk(n, k).relators:
        counts = [0] * n
        for x in r:
            counts[abs(x) - 1] += 1
        assert all(c % 2 == 0 for c in counts)


def test_abelianization_examples():
    assert abelianization_invariants(Presentation.involutive_group(1)) == [2]
    assert abelianization_invariants(FREE2) == [0, 0]
    base = knot_presentation(parse_gauss_code(TREFOIL))
    assert abelianization_invariants(build_Gk(base, 0)) == [2]
    assert abelianization_invariants(Presentation(2, ((1, 1, 1, 1, 1, 1), (2, 2, 2, 2)))) == [2, 12]
    assert abelianization_invariants(Presentation(3, ((1, 1), (2, 2, 2)))) == [6, 0]


@pytest.mark.parametrize("k", [0, 1, 2])
def test_abelianization_of_all_knot_truncations(k):
    codes = census_path().read_text().split() + [TREFOIL, FIGURE_EIGHT, UNKNOT]
    for code in codes:
        base = knot_presentation(parse_gauss_code(code))
        assert abelianization_invariants(build_Gk(base, k)) == [2], code


def test_smith_form_single_row_and_column():
    assert smith_normal_form([[2, 3]], 2) == [1]
    assert smith_normal_form([[4, 6, 10]], 3) == [2]
    assert smith_normal_form([[2], [3]], 1) == [1]


def determinantal_divisors(rows, ncols):
    """d_i = gcd of all i x i minors (independent of the elimination code)."""
    import sympy
    m = sympy.Matrix(rows) if rows else sympy.zeros(0, ncols)
    out = []
    for size in range(1, min(m.rows, m.cols) + 1):
        g = 0
        for ri in combinations(range(m.rows), size):
            for ci in combinations(range(m.cols), size):
                g = math.gcd(g, int(m.extract(list(ri), list(ci)).det()))
        if g == 0:
            break
        out.append(g)
    return out


matrices = st.integers(1, 4).flatmap(lambda c: st.lists(
    st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=0, max_size=4)
    .map(lambda rows: (rows, c)))


@given(matrices)
def test_smith_form_matches_minor_oracle(case):
    rows, ncols = case
    diag = smith_normal_form(rows, ncols)
    d = determinantal_divisors(rows, ncols)
    assert len(diag) == len(d)
    prod = 1
    for i, e in enumerate(diag):
        prod *= e
        assert prod == d[i]
        if i:
            assert e % diag[i - 1] == 0


def test_presentation_text_round_trip():
    for p in (build_Gnk(3, 1), Presentation(2, ((1, -2, -1, 2), (1, 1, 1)))):
        assert parse_presentation(format_presentation(p)) == p
    text = "gens: 2; involutive: 00\n# comment\ng1*g2^-1\n1\n"
    assert parse_presentation(text).relators == ((1, -2), ())


@pytest.mark.parametrize("bad", ["", "gens 2\n", "gens: 2; involutive: 1\n",
                                 "gens: 1; involutive: 0\ng2\n", "gens: 1; involutive: 0\nh1\n"])
def test_presentation_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_presentation(bad)
