import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limitres import oracles
from limitres.catalog import catalog_groups
from limitres.folding import fold, generates_free_group
from limitres.words import Word, abelianization, free_group


def p2(text):
    return free_group(2).word(text)


@pytest.mark.parametrize("gens,rank,expected", [
    (["a", "b"], 2, True),
    (["a*b", "b"], 2, True),
    (["a*b*a^-1", "a"], 2, True),
    (["a*b*a^-1", "b"], 2, False),
    (["a", "b*a*b^-1"], 2, False),
    (["a*b^2", "b*a*b", "b"], 2, True),
    (["[a,b]"], 2, False),
])
def test_rank_two_cases(gens, rank, expected):
    assert generates_free_group([p2(g) for g in gens], rank) is expected


def test_square_is_index_two():
    a2 = free_group(1).word("a^2")
    assert not generates_free_group([a2], 1)
    assert not oracles.spans_by_minors([abelianization(a2)], 1)


def test_empty_and_trivial():
    assert generates_free_group([], 0)
    assert not generates_free_group([], 1)
    assert not generates_free_group([Word.identity(2)], 2)


def test_rank_mismatch():
    with pytest.raises(ValueError):
        generates_free_group([Word.generator(3, 0)], 2)


def test_folded_graph_of_generators_is_rose():
    g = fold([p2("a"), p2("b")])
    assert g.is_rose(2) and g.rank() == 2


def test_nielsen_moves_preserve_generation():
    words = [p2("a"), p2("b")]
    for k in range(6):
        i, j = k % 2, 1 - k % 2
        words[i] = words[i] * words[j] if k % 3 else words[i] * ~words[j]
        assert generates_free_group(words, 2)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), st.lists(
    st.lists(st.tuples(st.integers(0, n - 1), st.sampled_from([1, -1])), max_size=6),
    min_size=1, max_size=4))))
@settings(max_examples=300)
def test_generation_implies_abelian_spanning(case):
    n, raw = case
    words = [Word(n, tuple(ls)) for ls in raw]
    if generates_free_group(words, n):
        assert oracles.spans_by_minors([abelianization(w) for w in words], n)


def test_catalog_free_groups_generated_by_their_generators():
    for name, pres in catalog_groups().items():
        if pres.is_free:
            assert generates_free_group(pres.gens(), pres.rank), name
