import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limitres import oracles
from limitres.errors import MalformedWordError, RankMismatchError
from limitres.repvar import Representation, evaluate
from limitres.sl2c import frob, sample_sl2
from limitres.words import (GroupMap, GroupRingElement, Presentation, Word, abelian_surjective,
                            abelianization, apply_map, commutator, compose, conjugate,
                            format_word, fox_derivative, free_abelian_group, free_group,
                            identity_map, invert, multiply, reduce, spans_integer_lattice,
                            word_ball)

X, Y, Z = 0, 1, 2


def w(rank, *letters):
    return Word(rank, tuple(letters))


def words(max_rank=5, max_len=32):
    return st.integers(1, max_rank).flatmap(
        lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.sampled_from([1, -1])),
                           max_size=max_len).map(lambda ls: Word(n, tuple(ls))))


def word_pairs(max_rank=5, max_len=32):
    def pair(n):
        ls = st.lists(st.tuples(st.integers(0, n - 1), st.sampled_from([1, -1])), max_size=max_len)
        return st.tuples(ls, ls, ls).map(lambda t: tuple(Word(n, tuple(x)) for x in t))
    return st.integers(1, max_rank).flatmap(pair)


class TestReduce:
    def test_cancellation(self):
        assert reduce([(X, 1), (X, -1)], 2).is_identity()

    def test_inner_cancellation(self):
        assert reduce([(X, 1), (Y, 1), (Y, -1), (X, 1)], 2) == w(2, (X, 1), (X, 1))

    def test_already_reduced(self):
        letters = ((X, 1), (Y, 1), (X, -1))
        assert reduce(letters, 2).letters == letters

    def test_index_out_of_range(self):
        with pytest.raises(MalformedWordError):
            reduce([(2, 1)], 2)

    def test_bad_sign(self):
        with pytest.raises(MalformedWordError):
            reduce([(0, 2)], 2)

    def test_not_a_letter(self):
        with pytest.raises(MalformedWordError):
            reduce([5], 2)

    @given(words())
    def test_idempotent_and_shortening(self, u):
        raw = u.letters
        assert reduce(raw, u.rank) == u
        assert len(reduce(raw, u.rank)) <= len(raw)

    @given(words())
    def test_no_adjacent_inverse_pairs(self, u):
        for (g, s), (h, t) in zip(u.letters, u.letters[1:]):
            assert not (g == h and s == -t)


class TestGroupLaws:
    def test_inverse_pair(self):
        assert multiply(w(2, (X, 1)), w(2, (X, -1))).is_identity()

    def test_invert_product(self):
        assert invert(w(2, (X, 1), (Y, 1))) == w(2, (Y, -1), (X, -1))

    def test_product_cancels(self):
        assert w(3, (X, 1), (Y, 1)) * w(3, (Y, -1), (Z, 1)) == w(3, (X, 1), (Z, 1))

    def test_rank_mismatch(self):
        with pytest.raises(RankMismatchError):
            w(2, (X, 1)) * w(3, (X, 1))

    @given(word_pairs())
    def test_associative(self, t):
        u, v, x = t
        assert (u * v) * x == u * (v * x)

    @given(words())
    def test_inverse(self, u):
        assert (u * ~u).is_identity()
        assert ~~u == u

    def test_powers_and_commutator(self):
        a, b = Word.generator(2, 0), Word.generator(2, 1)
        assert a ** 3 == w(2, (0, 1), (0, 1), (0, 1))
        assert a ** -2 == w(2, (0, -1), (0, -1))
        assert (a ** 0).is_identity()
        assert commutator(a, b) == a * b * ~a * ~b
        assert conjugate(b, a) == a * b * ~a

    def test_format(self):
        u = w(2, (0, 1), (0, 1), (1, -1))
        assert format_word(u) == "a^2*b^-1"
        assert format_word(Word.identity(2)) == "1"
        assert format_word(u, ["x", "y"]) == "x^2*y^-1"


class TestWordBall:
    @pytest.mark.parametrize("rank,radius", [(1, 3), (2, 3), (3, 2)])
    def test_size(self, rank, radius):
        # 2n (2n-1)^(k-1) reduced words of each length k
        expected = sum(2 * rank * (2 * rank - 1) ** (k - 1) for k in range(1, radius + 1))
        ball = word_ball(rank, radius)
        assert len(ball) == expected == len(set(ball))

    def test_shortlex(self):
        ball = word_ball(2, 3)
        assert [len(u) for u in ball] == sorted(len(u) for u in ball)


class TestPresentation:
    def test_structural_equality(self):
        p = Presentation(("a", "b"), (commutator(Word.generator(2, 0), Word.generator(2, 1)),))
        q = Presentation(("x", "y"), p.relators, "other")
        assert p == q and hash(p) == hash(q)
        assert p != free_group(2)

    def test_rejects_empty_relator(self):
        with pytest.raises(ValueError):
            Presentation(("a",), (Word.identity(1),))

    def test_rejects_duplicate_names(self):
        with pytest.raises(ValueError):
            Presentation(("a", "a"), ())

    def test_rejects_rank_mismatch(self):
        with pytest.raises(ValueError):
            Presentation(("a",), (Word.generator(2, 1),))

    def test_free_abelian(self):
        z3 = free_abelian_group(3)
        assert z3.rank == 3 and len(z3.relators) == 3 and not z3.is_free
        assert free_group(4).is_free and free_group(4).label == "F4"

    def test_word_parsing_helper(self):
        z2 = free_abelian_group(2)
        assert z2.word("[a,b]") == z2.relators[0]


class TestMaps:
    def setup_method(self):
        self.src = free_group(2, ["x", "y"])
        self.tgt = free_group(2, ["a", "b"])

    def test_substitution(self):
        f = GroupMap(self.src, self.tgt, (self.tgt.word("a"), self.tgt.word("b")))
        assert apply_map(f, self.src.word("x*y*x^-1")) == self.tgt.word("a*b*a^-1")

    def test_identity(self):
        u = self.src.word("x*y^2*x^-1")
        assert apply_map(identity_map(self.src), u) == u

    def test_hand_reduction_and_numeric_oracle(self, rng):
        f = GroupMap(self.src, self.tgt, (self.tgt.word("a*b"), self.tgt.word("b^-1")))
        assert apply_map(f, self.src.word("x*y")) == self.tgt.word("a")
        for _ in range(10):
            rho = Representation(self.tgt, (sample_sl2(rng), sample_sl2(rng)))
            lhs = evaluate(rho, self.tgt.word("a*b")) @ evaluate(rho, self.tgt.word("b^-1"))
            assert frob(lhs - evaluate(rho, self.tgt.word("a"))) < 1e-10

    def test_rank_mismatch(self):
        f = identity_map(self.src)
        with pytest.raises(RankMismatchError):
            apply_map(f, Word.generator(3, 0))
        with pytest.raises(RankMismatchError):
            GroupMap(self.src, self.tgt, (self.tgt.word("a"),))

    def test_compose_identity_and_inverse(self):
        f = GroupMap(self.src, self.src, (self.src.word("x*y"), self.src.word("y")))
        f_inv = GroupMap(self.src, self.src, (self.src.word("x*y^-1"), self.src.word("y")))
        assert compose(identity_map(self.src), f).images == f.images
        assert compose(f, f_inv).images == tuple(self.src.gens())
        assert compose(f_inv, f).images == tuple(self.src.gens())

    def test_compose_incompatible(self):
        f = identity_map(free_group(3))
        with pytest.raises(RankMismatchError):
            compose(f, identity_map(self.src))

    @given(word_pairs(max_rank=3, max_len=12), st.data())
    @settings(max_examples=60)
    def test_homomorphism(self, t, data):
        u, v, _ = t
        n = u.rank
        imgs = tuple(Word(3, tuple(data.draw(st.lists(
            st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=4)))) for _ in range(n))
        f = GroupMap(free_group(n), free_group(3), imgs)
        assert apply_map(f, u * v) == apply_map(f, u) * apply_map(f, v)

    def test_compose_associative(self):
        p = free_group(2)
        f = GroupMap(p, p, (p.word("a*b"), p.word("b")))
        g = GroupMap(p, p, (p.word("a"), p.word("b*a^2")))
        h = GroupMap(p, p, (p.word("b"), p.word("a")))
        assert compose(compose(f, g), h).images == compose(f, compose(g, h)).images


class TestFox:
    def setup_method(self):
        self.p = free_group(2, ["x", "y"])

    def test_axioms(self):
        one = GroupRingElement.one(2)
        x, y = self.p.gens()
        assert fox_derivative(x, 0) == one
        assert fox_derivative(y, 0).is_zero()
        assert fox_derivative(~x, 0) == GroupRingElement.from_terms([(-1, ~x)])

    def test_conjugate(self):
        u = self.p.word("x*y*x^-1")
        expected = GroupRingElement.from_terms([(1, Word.identity(2)), (-1, u)])
        assert fox_derivative(u, 0) == expected

    def test_commutator(self):
        c = self.p.word("[x,y]")
        expected = GroupRingElement.from_terms([(1, Word.identity(2)), (-1, self.p.word("x*y*x^-1"))])
        assert fox_derivative(c, 0) == expected

    def test_normalization(self):
        e = GroupRingElement.from_terms([(2, self.p.word("x")), (-2, self.p.word("x")),
                                         (1, self.p.word("y"))])
        assert e.terms == ((1, self.p.word("y")),)
        assert e.augmentation() == 1

    @given(word_pairs(max_len=16), st.data())
    @settings(max_examples=200)
    def test_product_rule(self, t, data):
        u, v, _ = t
        i = data.draw(st.integers(0, u.rank - 1))
        assert fox_derivative(u * v, i) == fox_derivative(u, i) + fox_derivative(v, i).left_multiply(u)

    def test_product_rule_1000_pairs(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            n = int(rng.integers(1, 6))
            u, v = (Word(n, tuple((int(g), int(s)) for g, s in zip(rng.integers(0, n, k),
                                                                  rng.choice([1, -1], k))))
                    for k in rng.integers(0, 33, 2))
            i = int(rng.integers(0, n))
            assert fox_derivative(u * v, i) == fox_derivative(u, i) + fox_derivative(v, i).left_multiply(u)

    @given(words())
    def test_fundamental_formula(self, u):
        # sum_i (d u / d x_i)(x_i - 1) = u - 1, checked through augmentation-free identity
        total = GroupRingElement()
        for i in range(u.rank):
            d = fox_derivative(u, i)
            xi = Word.generator(u.rank, i)
            total = total + GroupRingElement.from_terms([(c, v * xi) for c, v in d.terms]) - d
        expected = GroupRingElement.from_terms([(1, u), (-1, Word.identity(u.rank))])
        assert total == expected

    def test_out_of_range(self):
        with pytest.raises(MalformedWordError):
            fox_derivative(self.p.word("x"), 2)


class TestLatticeSpan:
    def test_examples(self):
        assert spans_integer_lattice([(1, 0), (0, 1)], 2)
        assert not spans_integer_lattice([(2, 0), (0, 1)], 2)
        assert spans_integer_lattice([(2, 0), (3, 0), (0, 1)], 2)
        assert not spans_integer_lattice([(1, 1), (1, -1)], 2)

    @given(st.integers(1, 3).flatmap(lambda d: st.tuples(
        st.just(d), st.lists(st.lists(st.integers(-4, 4), min_size=d, max_size=d), max_size=5))))
    @settings(max_examples=300)
    def test_matches_minor_oracle(self, case):
        dim, vecs = case
        assert spans_integer_lattice([tuple(v) for v in vecs], dim) == oracles.spans_by_minors(vecs, dim)

    def test_abelian_surjective(self):
        f2, z2 = free_group(2), free_abelian_group(2)
        assert abelian_surjective(GroupMap(f2, z2, tuple(z2.gens())))
        assert not abelian_surjective(GroupMap(f2, z2, (z2.word("a"), z2.word("a"))))
        assert abelianization(z2.word("a^3*b^-1*a^-1")) == (2, -1)
