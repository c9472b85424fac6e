import pytest
from hypothesis import given
from hypothesis import strategies as st

from orrforge.errors import ParseError, ResourceError
from orrforge.groups import is_isomorphic, quaternion8
from orrforge.presentations import (compile_text, coset_enumerate, invert_word, parse_presentation,
                                    power_word, reduce_word, word_str)
from orrforge.search import data_text

# Orders computed independently with sympy's FpGroup.order() on the same relators.
SYMPY_ORDERS = {
    "01_C1.pres": 1, "02_C2.pres": 2, "03_C3.pres": 3, "04_C4.pres": 4, "05_C22.pres": 4,
    "06_C5.pres": 5, "07_C6.pres": 6, "08_D3.pres": 6, "09_C7.pres": 7, "10_C8.pres": 8,
    "11_C4xC2.pres": 8, "12_C23.pres": 8, "13_D4.pres": 8, "14_Q8.pres": 8, "15_C9.pres": 9,
    "16_C32.pres": 9, "17_C10.pres": 10, "18_D5.pres": 10, "19_C11.pres": 11, "20_C12.pres": 12,
    "21_C6xC2.pres": 12, "22_D6.pres": 12, "23_A4.pres": 12, "24_Dic3.pres": 12,
    "25_C13.pres": 13, "26_C14.pres": 14, "27_D7.pres": 14, "28_C15.pres": 15,
    "29_C16.pres": 16, "30_C42.pres": 16, "31_C8xC2.pres": 16, "32_C4xC22.pres": 16,
    "33_C24.pres": 16, "34_D8.pres": 16, "35_Q16.pres": 16, "36_SD16.pres": 16,
    "37_M16.pres": 16, "38_C2xD4.pres": 16, "39_C2xQ8.pres": 16, "40_C4sC4.pres": 16,
    "41_C22sC4.pres": 16, "42_C4oD4.pres": 16,
}
EXCEPTION_ORDERS = {"d4od4.pres": 32, "ex16a.pres": 16, "ex16b.pres": 16, "ex32.pres": 32}


@pytest.mark.parametrize("fname", sorted(SYMPY_ORDERS))
def test_catalog_orders_match_oracle(fname):
    G = compile_text(data_text("catalog", fname))
    assert G.order == SYMPY_ORDERS[fname]


@pytest.mark.parametrize("fname", sorted(EXCEPTION_ORDERS))
def test_exception_orders_match_oracle(fname):
    P = parse_presentation(data_text("exceptions", fname))
    G = coset_enumerate(P)
    assert G.order == EXCEPTION_ORDERS[fname]
    assert P.satisfied_by(G, G.generators)


def test_grammar_features():
    text = """name: Q
gens: a b  # comment
rels: a^4, a^2 = b^2, a^b = a^-1
"""
    P = parse_presentation(text)
    assert P.name == "Q" and P.generators == ("a", "b")
    G = coset_enumerate(P)
    assert is_isomorphic(G, quaternion8())[0]
    # commutator, braces and bracketed exponents
    G2 = compile_text("gens: x y\nrels: x^{3}, y^(2), [x,y]")
    assert G2.order == 6 and G2.is_abelian()
    G3 = compile_text("gens: r s\nrels: r^5 = s^2 = (rs)^2 = 1")
    assert G3.order == 10 and not G3.is_abelian()
    G4 = compile_text("gens: r s\nrels: r^3\n      s^2, (r*s)^2")
    assert G4.order == 6


def test_multi_letter_generators():
    G = compile_text("gens: x10 x1\nrels: x10^2, x1^3, [x10, x1]")
    assert G.order == 6


@pytest.mark.parametrize("text, where", [
    ("gens: a\nrels: a^2, (ab)^2", 21),
    ("gens: a\nrels: (a^2", 14),
    ("gens: a\nrels: a^0", None),
    ("rels: a^2", 0),
    ("gens: a a", None),
    ("gens: a\nrels: a^", None),
    ("gens: a\nrels: [a, a", None),
    ("gens: a\nfoo", None),
])
def test_parse_errors(text, where):
    with pytest.raises(ParseError) as exc:
        parse_presentation(text)
    if where is not None:
        assert exc.value.position == where


def test_infinite_presentation_hits_limit():
    with pytest.raises(ResourceError):
        compile_text("gens: a b\nrels: a^2", max_cosets=200)


word_st = st.lists(st.tuples(st.sampled_from("abc"), st.integers(-3, 3)), max_size=8)


@given(word_st)
def test_reduce_is_idempotent_and_inverse_cancels(w):
    r = reduce_word(w)
    assert reduce_word(r) == r
    assert all(e != 0 for _, e in r)
    assert all(r[i][0] != r[i + 1][0] for i in range(len(r) - 1))
    assert reduce_word(r + invert_word(r)) == ()
    assert power_word(r, -1) == invert_word(r)


@given(word_st)
def test_word_str_round_trip(w):
    r = reduce_word(w)
    if not r:
        assert word_str(r) == "1"
        return
    P = parse_presentation(f"gens: a b c\nrels: {word_str(r)}")
    assert P.relators == (r,)
