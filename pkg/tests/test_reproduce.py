import pytest

from orrforge.reproduce import (abelian_2group_shapes, check_abelian_shape, nowitz_watkins_sample,
                                run_suite)


def test_abelian_shapes_exclude_hypothesis_failures():
    shapes = abelian_2group_shapes(128)
    # 44 partitions of 1..7, minus 7 elementary abelian and 6 of type C4 x C2^j
    assert len(shapes) == len({tuple(s) for s in shapes}) == 31
    for s in shapes:
        assert any(o > 2 for o in s)
        assert not (s[0] == 4 and all(o == 2 for o in s[1:]))
    assert [8] in shapes and [4, 4] in shapes and [4, 2] not in shapes


def test_check_abelian_shape_keys():
    res = check_abelian_shape([8, 2])
    assert set(res) >= {"trivial_stabiliser"} and all(res.values())


def test_nowitz_watkins_sample_is_seeded():
    a = nowitz_watkins_sample(10)
    assert a == nowitz_watkins_sample(10)
    assert all(closed and setwise for _, _, closed, setwise in a)


def test_run_suite_filters():
    rows = run_suite(1, only=["imrich", "c4xc2^4"])
    assert [r.key for r in rows] == ["imrich"]
    assert rows[0].status == "PASS"
