import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dquotient.evaluate import (
    ScoreError,
    correlation_report,
    load_scores_csv,
    pearson,
    pool_mean_ssim,
    pool_minkowski,
    spearman,
)
from dquotient.metrics import MetricMap, MetricParams

finite = st.floats(0, 1e3, allow_nan=False)


class TestMinkowski:
    def test_p1(self):
        assert pool_minkowski([0.0, 1.0], 1) == 0.5

    def test_p2(self):
        assert pool_minkowski([0.0, 1.0], 2) == pytest.approx(math.sqrt(0.5), abs=1e-15)

    @pytest.mark.parametrize("p", [0.5, 1, 2, 2.2, 7])
    def test_constant(self, p):
        assert pool_minkowski(np.full((3, 3), 0.3), p) == pytest.approx(0.3, rel=1e-14)

    def test_accepts_metric_map(self):
        m = MetricMap("dq", MetricParams(), np.array([[0.0, 1.0]]))
        assert pool_minkowski(m, 1) == 0.5

    def test_errors(self):
        with pytest.raises(ValueError):
            pool_minkowski([], 1)
        with pytest.raises(ValueError):
            pool_minkowski([0.1], 0)
        with pytest.raises(ValueError):
            pool_minkowski([-0.5, 0.5], 2.2)
        with pytest.raises(ValueError):
            pool_minkowski([-0.5, 0.5], 1)

    def test_signed_maps(self):
        assert pool_minkowski([-1.0, 1.0], 2) == 1.0
        assert pool_minkowski([-1.0, 1.0], 2.2, absolute=True) == pytest.approx(1.0)

    @given(st.lists(finite, min_size=1, max_size=30), st.floats(0.2, 5), st.data())
    def test_monotone(self, values, p, data):
        i = data.draw(st.integers(0, len(values) - 1))
        bump = data.draw(st.floats(0, 100))
        raised = list(values)
        raised[i] += bump
        assert pool_minkowski(raised, p) >= pool_minkowski(values, p) * (1 - 1e-12)

    @given(st.lists(finite, min_size=1, max_size=30), st.floats(0.2, 5), st.randoms())
    def test_permutation_invariant(self, values, p, r):
        shuffled = list(values)
        r.shuffle(shuffled)
        assert pool_minkowski(shuffled, p) == pytest.approx(pool_minkowski(values, p), rel=1e-12, abs=1e-300)


class TestMeanSSIM:
    def test_values(self):
        assert pool_mean_ssim([1.0, 1.0, 1.0]) == 1
        assert pool_mean_ssim([0.5, 1.0]) == 0.75

    def test_empty(self):
        with pytest.raises(ValueError):
            pool_mean_ssim([])

    def test_links_to_dq(self, rng):
        # mean(1 - S_V) = 2 * (DQ pooled with p = 2)^2
        from dquotient.metrics import dissimilarity_map, dq_map
        from dquotient.window import sym_stats

        f1 = rng.random((40, 40))
        y = sym_stats(f1, f1 + 0.1 * rng.standard_normal((40, 40)))
        lhs = pool_mean_ssim(dissimilarity_map(y))
        rhs = 2 * pool_minkowski(dq_map(y), 2) ** 2
        assert abs(lhs - rhs) < 1e-10


class TestPearson:
    def test_linear(self):
        xs = [1.0, 2.0, 5.0, 7.0]
        assert pearson(xs, [2 * x + 1 for x in xs]) == pytest.approx(1.0, abs=1e-15)
        assert pearson(xs, [-x for x in xs]) == pytest.approx(-1.0, abs=1e-15)

    def test_hand_value(self):
        # 3 / sqrt(2 * 42 / 9)
        assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.98198, abs=1e-5)
        assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(3 / math.sqrt(84 / 9), abs=1e-15)

    def test_degenerate(self):
        with pytest.raises(ValueError):
            pearson([1, 1, 1], [1, 2, 3])
        with pytest.raises(ValueError):
            pearson([1, 2], [1, 2])
        with pytest.raises(ValueError):
            pearson([1, 2, 3], [1, 2])


class TestSpearman:
    def test_monotone_map(self):
        xs = [0.3, -1.0, 2.0, 5.0, 0.0]
        assert spearman(xs, [x**3 for x in xs]) == pytest.approx(1.0)

    def test_reversed(self):
        assert spearman([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1.0)

    def test_hand_value(self):
        # 1 - 6 * 2 / (4 * 15)
        assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-15)

    def test_ties_average(self):
        # ranks (1.5, 1.5, 3) vs (1, 2, 3)
        assert spearman([1, 1, 2], [1, 2, 3]) == pytest.approx(pearson([1.5, 1.5, 3], [1, 2, 3]))

    def test_all_equal(self):
        with pytest.raises(ValueError):
            spearman([2, 2, 2], [1, 2, 3])

    @given(
        st.lists(st.integers(0, 10**6), min_size=3, max_size=25),
        st.lists(st.floats(-100, 100), min_size=25, max_size=25),
    )
    def test_square_root_leaves_ranks(self, ms, scores):
        scores = scores[: len(ms)]
        assume(len(set(ms)) > 1 and len(set(scores)) > 1)
        m = np.array(ms, dtype=float)
        assert spearman(m, scores) == spearman(np.sqrt(m), scores)


class TestScoresCSV:
    def test_parse(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("id,metric,score\na,0.1,80\n\nb,0.3,40\n")
        t = load_scores_csv(p)
        assert len(t) == 2
        assert t.rows[1].id == "b" and t.rows[1].metric == 0.3 and t.rows[1].score == 40

    def test_duplicate(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("id,metric,score\na,0.1,80\na,0.2,70\n")
        with pytest.raises(ScoreError, match="'a'"):
            load_scores_csv(p)

    def test_non_numeric(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("id,metric,score\na,0.1,80\nb,0.2,good\n")
        with pytest.raises(ScoreError, match=":3:"):
            load_scores_csv(p)

    def test_column_count(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("id,metric,score\na,0.1\n")
        with pytest.raises(ScoreError, match="3 columns"):
            load_scores_csv(p)

    def test_header(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("name,value\n")
        with pytest.raises(ScoreError):
            load_scores_csv(p)

    def test_report(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("id,metric,score\na,0.04,10\nb,0.16,20\nc,0.36,30\nd,0.64,40\n")
        r = correlation_report(load_scores_csv(p), "dq", 1.0)
        assert set(r) == {"schema", "metric", "p", "pooled", "pearson_raw", "pearson_sqrt", "spearman"}
        # scores are linear in sqrt(metric)
        assert r["pearson_sqrt"] == pytest.approx(1.0, abs=1e-12)
        assert r["pearson_raw"] < r["pearson_sqrt"]
        assert r["spearman"] == pytest.approx(1.0)
        assert r["pooled"] == {"a": 0.04, "b": 0.16, "c": 0.36, "d": 0.64}

    def test_report_needs_three_rows(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("id,metric,score\na,0.1,1\nb,0.2,2\n")
        with pytest.raises(ScoreError):
            correlation_report(load_scores_csv(p))
