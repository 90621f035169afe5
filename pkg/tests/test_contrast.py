import numpy as np
import pytest

from gsplab.analysis import RatingRow, contrast_curve, rating_rows_from_state


def row(stim, kind, intended, iteration, probed, rating):
    return RatingRow(stim, kind, intended, iteration, probed, rating)


def trajectory_rows(iteration, intended_ratings, other_ratings,
                    stim_prefix="s"):
    rows = []
    for i, r in enumerate(intended_ratings):
        rows.append(row(f"{stim_prefix}{i}", "trajectory", "anger",
                        iteration, "anger", r))
    for i, r in enumerate(other_ratings):
        rows.append(row(f"{stim_prefix}{i}", "trajectory", "anger",
                        iteration, "happiness", r))
    return rows


class TestContrastCurve:
    def test_hand_arithmetic(self):
        rows = trajectory_rows(2, [4, 4, 3], [1, 2, 2, 1])
        curve = contrast_curve(rows, seed=0, bootstrap_n=10)
        by_label = {b.label: b for b in curve}
        b = by_label["1-4"]
        assert b.mean_intended == pytest.approx(11 / 3)
        assert b.mean_nonintended == pytest.approx(1.5)
        assert b.contrast == pytest.approx(11 / 3 - 1.5)

    def test_identical_ratings_zero_contrast_zero_ci(self):
        rows = trajectory_rows(3, [2, 2, 2], [2, 2, 2])
        b = {x.label: x for x in contrast_curve(rows, seed=0)}["1-4"]
        assert b.contrast == 0.0
        assert b.ci_low == 0.0 and b.ci_high == 0.0

    def test_empty_bins_emitted_as_missing(self):
        rows = trajectory_rows(0, [4], [1])
        curve = contrast_curve(rows, seed=0, bootstrap_n=10)
        by_label = {b.label: b for b in curve}
        assert by_label["0"].contrast is not None
        for label in ("1-4", "5-8", "transfer", "random"):
            assert by_label[label].contrast is None
            assert by_label[label].n_ratings == 0

    def test_standard_bin_layout(self):
        rows = trajectory_rows(1, [3], [2])
        labels = [b.label for b in contrast_curve(rows, seed=0,
                                                  bootstrap_n=5)]
        assert labels == ["0", "1-4", "5-8", "9-12", "13-16", "17-20",
                          "transfer", "random"]

    def test_short_run_drops_late_bins(self):
        rows = trajectory_rows(1, [3], [2])
        labels = [b.label for b in contrast_curve(rows, n_iterations=4,
                                                  seed=0, bootstrap_n=5)]
        assert labels == ["0", "1-4", "transfer", "random"]

    def test_empty_table_rejected(self):
        with pytest.raises(ValueError):
            contrast_curve([], seed=0)

    def test_probe_independent_ratings_near_zero(self):
        rng = np.random.default_rng(0)
        rows = []
        for i in range(120):
            r = int(rng.integers(1, 5))
            rows.append(row(f"r{i}", "random", "anger", None,
                            ["anger", "happiness", "sadness"][i % 3], r))
        b = {x.label: x for x in contrast_curve(rows, seed=1)}["random"]
        # CI must straddle (or nearly straddle) zero
        assert b.ci_low < 0.3 and b.ci_high > -0.3

    def test_bootstrap_ci_brackets_estimate(self):
        rows = trajectory_rows(18, [4, 3, 4, 4, 3], [1, 2, 1, 2, 2])
        b = {x.label: x for x in contrast_curve(rows, seed=3)}["17-20"]
        assert b.ci_low <= b.contrast <= b.ci_high


class TestRatingRowsFromState:
    def test_flattening(self, tiny_sim):
        state = tiny_sim.experiment.state
        rows = rating_rows_from_state(state)
        assert len(rows) == sum(len(v) for v in state.ratings.values())
        kinds = {r.kind for r in rows}
        assert kinds == {"trajectory", "random", "transfer"}
        assert all(1 <= r.rating <= 4 for r in rows)
