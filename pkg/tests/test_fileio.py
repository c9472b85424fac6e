import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orrforge.digraph import ConnectionSet
from orrforge.errors import ArgumentError, ParseError, ValidationError
from orrforge.fileio import (conn_to_text, group_to_text, load_group, parse_conn_text,
                             parse_group_text, save_group)
from orrforge.groups import abelian, dihedral, quaternion8


def test_group_round_trip(tmp_path):
    G = dihedral(5)
    path = tmp_path / "d5.grp"
    save_group(G, path)
    H = load_group(path)
    assert H.name == "D5" and np.array_equal(H.table, G.table)


def test_load_presentation(tmp_path):
    path = tmp_path / "q.pres"
    path.write_text("name: Q\ngens: a b\nrels: a^4, a^2 = b^2, a^b = a^-1\n")
    G = load_group(path)
    assert G.name == "Q" and G.order == 8


def test_missing_file(tmp_path):
    with pytest.raises(ArgumentError):
        load_group(tmp_path / "nope.grp")


@pytest.mark.parametrize("text, err", [
    ("", ParseError),
    ("grp X order 1\n0", ParseError),
    ("group X order two\n0", ParseError),
    ("group X order 0", ParseError),
    ("group X order 2\n0 1", ParseError),
    ("group X order 2\n0 1\n1 x", ParseError),
    ("group X order 2\n0 1\n1", ParseError),
    ("group X order 2\n0 1\n1 2", ValidationError),
    ("group X order 2\n0 1\n1 1", ValidationError),
])
def test_group_parse_errors(text, err):
    with pytest.raises(err):
        parse_group_text(text)


def test_comments_are_ignored():
    G = parse_group_text("# C2\ngroup C2 order 2\n0 1\n\n1 0\n")
    assert G.order == 2


@given(st.sampled_from([quaternion8(), abelian([4, 2]), dihedral(3)]), st.data())
def test_conn_round_trip(G, data):
    S = ConnectionSet(G, data.draw(st.sets(st.integers(0, G.order - 1))))
    text = conn_to_text(S)
    assert parse_conn_text(text, G).members == S.members
    assert parse_group_text(group_to_text(G)).order == G.order


def test_conn_errors():
    G = quaternion8()
    with pytest.raises(ParseError) as exc:
        parse_conn_text("1\nfoo\n", G)
    assert exc.value.position == 1
    with pytest.raises(ValidationError):
        parse_conn_text("8\n", G)
