import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limitres import oracles, repvar
from limitres.catalog import catalog_groups, catalog_splittings
from limitres.errors import PreconditionError, RankMismatchError
from limitres.repvar import (Representation, check_hom_numeric, evaluate, is_on_variety,
                             local_dimension, pullback, relator_jacobian, sample_on_variety,
                             screen_nondegenerate)
from limitres.sl2c import I2, frob, sample_sl2
from limitres.words import GroupMap, Word, compose, word_ball

G = catalog_groups()


def diag(x):
    return np.diag([x, 1 / x]).astype(complex)


def random_point(pres, rng):
    return Representation(pres, tuple(sample_sl2(rng) for _ in range(pres.rank)))


def diagonal_point(pres, rng):
    # simultaneously diagonal: a generic point of the commuting variety
    return Representation(pres, tuple(diag(complex(*rng.normal(size=2)) + 2) for _ in range(pres.rank)))


class TestEvaluate:
    def test_identity_and_generator(self, rng):
        rho = random_point(G["F2"], rng)
        assert np.array_equal(evaluate(rho, Word.identity(2)), I2)
        assert np.array_equal(evaluate(rho, Word.generator(2, 0)), rho[0])

    def test_commutator_of_diagonal_pair(self):
        rho = Representation(G["Z2"], (diag(2), diag(3)))
        assert frob(evaluate(rho, G["Z2"].relators[0]) - I2) < 1e-10

    def test_rank_mismatch(self, rng):
        with pytest.raises(RankMismatchError):
            evaluate(random_point(G["F2"], rng), Word.generator(3, 0))
        with pytest.raises(RankMismatchError):
            Representation(G["F2"], (I2,))

    def test_rejects_non_unimodular(self):
        with pytest.raises(ValueError):
            Representation(G["F1"], (2 * I2,))

    def test_multiplicative(self):
        rng = np.random.default_rng(11)
        rho = random_point(G["F3"], rng)
        ball = word_ball(3, 3)
        for _ in range(200):
            u, v = (ball[i] for i in rng.integers(0, len(ball), 2))
            assert frob(evaluate(rho, u * v) - evaluate(rho, u) @ evaluate(rho, v)) < 1e-10

    def test_json_round_trip(self, rng):
        rho = random_point(G["F2"], rng)
        again = Representation.from_json(rho.to_json(), G["F2"])
        assert all(np.array_equal(a, b) for a, b in zip(rho.matrices, again.matrices))


class TestMembership:
    def test_free_is_always_on(self, rng):
        assert is_on_variety(random_point(G["F3"], rng)).residual == 0

    def test_diagonal_pair(self):
        assert is_on_variety(Representation(G["Z2"], (diag(2), diag(3)))).residual < 1e-12

    def test_random_pairs_fail(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            assert is_on_variety(random_point(G["Z2"], rng)).relator_residual > 0.1

    def test_edge_residual(self, rng):
        rho = random_point(G["F2"], rng)
        a, b = G["F2"].gens()
        rep = is_on_variety(rho, edge_pairs=[(a, b)])
        assert rep.edge_residual > 0.1 and not rep.ok


class TestScreening:
    def test_trivial_rep_fails(self):
        rho = Representation(G["F2"], (I2, I2))
        assert not screen_nondegenerate(rho, word_ball(2, 2))

    def test_trace_minus_two_fails(self):
        rho = Representation(G["F2"], (-I2 @ np.array([[1, 1], [0, 1]]), diag(2)))
        assert not screen_nondegenerate(rho, word_ball(2, 1))

    def test_generic_passes(self):
        rng = np.random.default_rng(13)
        ball = word_ball(2, 4)
        assert all(screen_nondegenerate(random_point(G["F2"], rng), ball) for _ in range(100))

    @given(st.integers(0, 2 ** 32 - 1), st.floats(1e-12, 1e-2), st.floats(1e-12, 1e-2))
    @settings(max_examples=40, deadline=None)
    def test_monotone_in_delta(self, seed, d1, d2):
        lo, hi = sorted((d1, d2))
        rng = np.random.default_rng(seed)
        # a rotation close to pi puts short words near trace -2
        theta = math.pi - rng.uniform(0, 0.02)
        rho = Representation(G["F2"], (np.array([[math.cos(theta), -math.sin(theta)],
                                                 [math.sin(theta), math.cos(theta)]]),
                                       sample_sl2(rng)))
        ball = word_ball(2, 2)
        if screen_nondegenerate(rho, ball, hi):
            assert screen_nondegenerate(rho, ball, lo)


def _catalog_points(rng):
    pts = [random_point(G[f"F{n}"], rng) for n in range(1, 4)]
    pts += [sample_on_variety(G[f"Z{n}"], rng) for n in (2, 3, 4)]
    pts += [sample_on_variety(G["S2"], rng)]
    for fixture in catalog_splittings().values():
        pts.append(sample_on_variety(fixture.splitting.assembled, rng))
    return pts


class TestJacobian:
    def test_free_is_empty(self, rng):
        jac = relator_jacobian(random_point(G["F3"], rng))
        assert jac.shape == (0, 9)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(14)
        for p in _catalog_points(rng):
            jac = relator_jacobian(p)
            fd = oracles.fd_jacobian([r.letters for r in p.presentation.relators], p.matrices)
            assert jac.shape == fd.shape
            if jac.size:
                assert np.linalg.norm(jac - fd) <= 1e-5 * max(1.0, np.linalg.norm(jac))

    def test_off_variety_is_rejected(self, rng):
        with pytest.raises(PreconditionError):
            relator_jacobian(random_point(G["Z2"], rng))

    def test_z2_generic_rank_two(self, rng):
        p = diagonal_point(G["Z2"], rng)
        sv = np.linalg.svd(relator_jacobian(p), compute_uv=False)
        assert repvar.numeric_rank(sv, 1e-8)[0] == 2

    def test_z2_at_identity(self):
        est = local_dimension(Representation(G["Z2"], (I2, I2)))
        assert est.jacobian_rank == 0 and est.local_dim == 6 and not est.trusted
        assert np.allclose(oracles.fd_jacobian([G["Z2"].relators[0].letters], [I2, I2]), 0)


class TestLocalDimension:
    @pytest.mark.parametrize("n", range(1, 6))
    def test_free_exact(self, n, rng):
        est = local_dimension(random_point(G[f"F{n}"], rng))
        assert est.local_dim == 3 * n and est.exact and est.trusted

    # frozen after the finite-difference oracle agreed on 20 points each
    @pytest.mark.parametrize("name,expected", [("Z2", 4), ("Z3", 5), ("Z4", 6), ("Z5", 7), ("S2", 9)])
    def test_catalog_values(self, name, expected):
        rng = np.random.default_rng(15)
        pres = G[name]
        for _ in range(20):
            p = sample_on_variety(pres, rng)
            est = local_dimension(p)
            assert est.trusted and est.local_dim == expected
            assert oracles.fd_local_dimension([r.letters for r in pres.relators], p.matrices) == expected

    def test_diagonal_points(self, rng):
        for n, expected in ((2, 4), (3, 5)):
            for _ in range(20):
                p = diagonal_point(G[f"Z{n}"], rng)
                assert local_dimension(p).local_dim == expected
                assert oracles.fd_local_dimension([r.letters for r in G[f"Z{n}"].relators],
                                                  p.matrices) == expected

    def test_json(self, rng):
        est = local_dimension(sample_on_variety(G["Z2"], rng))
        data = est.to_json(include_point=True)
        assert data["local_dim"] == 4 and len(data["singular_values"]) == 3
        assert data["point"]["presentation"] == "Z2"
        assert local_dimension(random_point(G["F1"], rng)).to_json()["rank_gap"] is None

    def test_bounds(self, rng):
        for pres in (G["Z3"], G["S2"]):
            est = local_dimension(sample_on_variety(pres, rng))
            assert 0 <= est.local_dim <= 3 * pres.rank


class TestPullback:
    def test_identity(self, rng):
        p = random_point(G["F2"], rng)
        q = pullback(GroupMap(G["F2"], G["F2"], tuple(G["F2"].gens())), p)
        assert all(np.array_equal(a, b) for a, b in zip(p.matrices, q.matrices))

    def test_abelianization(self):
        p = Representation(G["Z2"], (diag(2), diag(3)))
        q = pullback(GroupMap(G["F2"], G["Z2"], tuple(G["Z2"].gens())), p)
        assert q.presentation == G["F2"]
        assert all(np.array_equal(a, b) for a, b in zip(p.matrices, q.matrices))

    def test_composition(self, rng):
        f = GroupMap(G["F2"], G["Z2"], tuple(G["Z2"].gens()))
        g = GroupMap(G["Z2"], G["Z1"], (G["Z1"].word("a"), G["Z1"].word("1")))
        p = Representation(G["Z1"], (sample_sl2(rng),))
        two_step = pullback(f, pullback(g, p))
        one_step = pullback(compose(g, f), p)
        assert max(frob(a - b) for a, b in zip(two_step.matrices, one_step.matrices)) < 1e-10
        assert is_on_variety(pullback(g, p)).ok

    def test_rank_mismatch(self, rng):
        f = GroupMap(G["F2"], G["Z2"], tuple(G["Z2"].gens()))
        with pytest.raises(RankMismatchError):
            pullback(f, random_point(G["F3"], rng))

    def test_check_hom_numeric(self, rng):
        good = GroupMap(G["Z2"], G["Z1"], (G["Z1"].word("a"), G["Z1"].word("a^2")))
        bad = GroupMap(G["Z2"], G["F2"], tuple(G["F2"].gens()))
        assert check_hom_numeric(good, [random_point(G["Z1"], rng) for _ in range(5)]) < 1e-10
        assert check_hom_numeric(bad, [random_point(G["F2"], rng) for _ in range(5)]) > 0.1


class TestProjection:
    def test_lands_on_variety_away_from_identity(self, rng):
        for name in ("Z2", "Z3", "S2"):
            p = sample_on_variety(G[name], rng)
            assert is_on_variety(p, 1e-12).ok
            assert all(min(frob(m - I2), frob(m + I2)) > 1e-4 for m in p.matrices)

    def test_free_passthrough(self, rng):
        p = random_point(G["F2"], rng)
        assert repvar.project_to_variety(p) is p
