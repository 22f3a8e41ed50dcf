import math

import numpy as np
import pytest

from explore.cf import (
    CFConfig,
    Neighbor,
    NeighborSet,
    neighbors,
    pearson,
    predict_rating,
    recommend_cf,
    similarity,
)
from explore.errors import (
    EmptyNeighborhoodError,
    InsufficientOverlapError,
    NoRatingSupportError,
)

from conftest import make_matrix, random_matrix
from oracles import (
    cf_neighbors_bruteforce,
    cf_predict_bruteforce,
    cf_recommend_bruteforce,
)


class TestPearson:
    def test_perfect_positive(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == 1.0

    def test_perfect_negative(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == -1.0

    def test_hand_computed(self):
        # means 4 and 10/3; centered dot 3; norms sqrt(2), sqrt(78/9)
        assert pearson([5, 3, 4], [4, 1, 5]) == pytest.approx(
            9 / math.sqrt(156), abs=1e-12
        )

    def test_insufficient_overlap(self):
        with pytest.raises(InsufficientOverlapError):
            pearson([1, 2], [2, 3])

    def test_zero_variance_undefined(self):
        assert pearson([3, 3, 3], [1, 2, 3]) is None

    def test_symmetry_and_affine(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a = list(rng.uniform(1, 5, size=6))
            b = list(rng.uniform(1, 5, size=6))
            assert pearson(a, b) == pytest.approx(pearson(b, a), abs=1e-12)
            alpha, beta = float(rng.uniform(0.1, 3)), float(rng.uniform(-2, 2))
            assert pearson(a, [alpha * x + beta for x in a]) == pytest.approx(
                1.0, abs=1e-9
            )


class TestNeighbors:
    def test_identical_rows_single_neighbor(self):
        m = make_matrix([{0: 1.0, 1: 4.0, 2: 3.0}, {0: 1.0, 1: 4.0, 2: 3.0}])
        ns = neighbors(m, 0, k=5, config=CFConfig(significance_weighting=False))
        assert len(ns) == 1
        assert ns.neighbors[0] == Neighbor(1, 1.0, 3)

    def test_no_shared_songs(self):
        m = make_matrix([{0: 2.0, 1: 3.0, 2: 4.0}, {3: 2.0, 4: 3.0, 5: 4.0}])
        with pytest.raises(EmptyNeighborhoodError):
            neighbors(m, 0, k=5)

    def test_matches_bruteforce_on_toy(self, toy_matrix):
        rows = [toy_matrix.row_dict(u) for u in range(toy_matrix.n_users)]
        for u in range(toy_matrix.n_users):
            want = cf_neighbors_bruteforce(rows, u, k=3)
            got = neighbors(toy_matrix, u, k=3)
            assert [(nb.user, nb.co_rated) for nb in got] == [
                (v, c) for (v, _, c) in want
            ]
            for nb, (_, sim, _) in zip(got, want):
                assert nb.similarity == pytest.approx(sim, abs=1e-9)

    def test_significance_weighting_damps(self):
        m = make_matrix([{0: 1.0, 1: 2.0, 2: 3.0}, {0: 2.0, 1: 3.0, 2: 4.0}])
        damped = neighbors(m, 0, k=1)
        assert damped.neighbors[0].similarity == pytest.approx(3 / 50, abs=1e-12)

    def test_drop_negative(self):
        m = make_matrix([
            {0: 1.0, 1: 2.0, 2: 3.0},
            {0: 3.0, 1: 2.0, 2: 1.0},
            {0: 1.5, 1: 2.0, 2: 2.5},
        ])
        keep = neighbors(m, 0, k=5)
        assert {nb.user for nb in keep} == {1, 2}
        drop = neighbors(m, 0, k=5, config=CFConfig(drop_negative=True))
        assert {nb.user for nb in drop} == {2}


class TestPredictRating:
    def test_hand_example(self):
        # neighbor means 4 and 3 by construction; target mean 3
        m = make_matrix([
            {0: 3.0},
            {1: 5.0, 2: 3.0},
            {1: 2.0, 2: 4.0},
        ])
        ns = NeighborSet(0, [Neighbor(1, 0.8, 3), Neighbor(2, 0.4, 3)])
        pred = predict_rating(m, 0, 1, ns)
        assert pred.value == pytest.approx(3 + (0.8 * 1 + 0.4 * (-1)) / 1.2, abs=1e-12)
        assert pred.support == 2

    def test_single_neighbor_at_own_mean(self):
        m = make_matrix([{0: 2.0}, {1: 4.0, 2: 4.0}])
        ns = NeighborSet(0, [Neighbor(1, 0.9, 3)])
        assert predict_rating(m, 0, 1, ns).value == 2.0

    def test_single_neighbor_deviation_identity(self):
        m = make_matrix([{0: 3.0}, {1: 5.0, 2: 2.0}])
        ns = NeighborSet(0, [Neighbor(1, -0.6, 3)])
        # mean_i - (r_u - mean_u) = 3 - (5 - 3.5)
        assert predict_rating(m, 0, 1, ns).value == pytest.approx(1.5, abs=1e-9)

    def test_clamped_to_range(self):
        m = make_matrix([{0: 5.0}, {1: 5.0, 2: 1.0}])
        ns = NeighborSet(0, [Neighbor(1, 1.0, 3)])
        assert predict_rating(m, 0, 1, ns).value == 5.0

    def test_no_support(self):
        m = make_matrix([{0: 3.0}, {0: 3.0}])
        ns = NeighborSet(0, [Neighbor(1, 0.5, 3)])
        with pytest.raises(NoRatingSupportError):
            predict_rating(m, 0, 1, ns)

    def test_constant_shift_property(self):
        rows = [
            {0: 2.0, 1: 3.0, 2: 1.0, 3: 2.5},
            {0: 3.0, 1: 1.0, 2: 2.0, 3: 3.0, 4: 3.0},
            {0: 4.0, 1: 3.0, 2: 4.0, 3: 3.0, 4: 5.0},
            {0: 3.0, 1: 3.0, 2: 1.0, 3: 5.0, 4: 4.0},
        ]
        base = make_matrix(rows)
        shifted_rows = [dict(r) for r in rows]
        shifted_rows[0] = {s: r + 1.0 for s, r in rows[0].items()}
        shifted = make_matrix(shifted_rows)
        ns0 = neighbors(base, 0, k=3)
        ns1 = neighbors(shifted, 0, k=3)
        assert [nb.user for nb in ns0] == [nb.user for nb in ns1]
        for song in range(base.n_songs):
            try:
                before = predict_rating(base, 0, song, ns0).value
                after = predict_rating(shifted, 0, song, ns1).value
            except NoRatingSupportError:
                continue
            if before + 1.0 <= 5.0:  # comparison valid only when unclamped
                assert after == pytest.approx(before + 1.0, abs=1e-9)


class TestRecommend:
    def test_matches_bruteforce_on_toy(self, toy_matrix):
        rows = [toy_matrix.row_dict(u) for u in range(toy_matrix.n_users)]
        means = [sum(r.values()) / len(r) for r in rows]
        for u in range(toy_matrix.n_users):
            want = cf_recommend_bruteforce(
                rows, means, toy_matrix.n_songs, u, n=4, k=3
            )
            got = recommend_cf(toy_matrix, u, n=4, config=CFConfig(k=3))
            assert [s for s, _ in got] == [s for s, _ in want]
            for (_, g), (_, w) in zip(got, want):
                assert g == pytest.approx(w, abs=1e-9)

    def test_n_larger_than_candidates(self, toy_matrix):
        got = recommend_cf(toy_matrix, 0, n=100)
        assert len(got) <= toy_matrix.n_songs

    def test_include_rated(self, toy_matrix):
        got = recommend_cf(toy_matrix, 0, n=100, exclude_rated=False)
        rated = set(toy_matrix.row(0)[0])
        assert rated & {s for s, _ in got}

    def test_deterministic(self, toy_matrix):
        assert recommend_cf(toy_matrix, 1, n=5) == recommend_cf(toy_matrix, 1, n=5)

    def test_random_instances_match_bruteforce(self):
        rng = np.random.default_rng(17)
        checked = 0
        for _ in range(25):
            n_users = int(rng.integers(2, 7))
            n_songs = int(rng.integers(4, 11))
            rows = random_matrix(rng, n_users, n_songs, density=0.7, min_row=2)
            m = make_matrix(rows)
            m_rows = [m.row_dict(u) for u in range(n_users)]
            means = [sum(r.values()) / len(r) for r in m_rows]
            for u in range(n_users):
                want = cf_recommend_bruteforce(m_rows, means, n_songs, u, n=5, k=3)
                try:
                    got = recommend_cf(m, u, n=5, config=CFConfig(k=3))
                except EmptyNeighborhoodError:
                    assert want is None
                    continue
                assert [s for s, _ in got] == [s for s, _ in want]
                for (_, g), (_, w) in zip(got, want):
                    assert g == pytest.approx(w, abs=1e-9)
                checked += 1
        assert checked > 10
