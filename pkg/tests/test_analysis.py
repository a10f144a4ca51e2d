import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from havswarm.analysis import (
    CloseMiss,
    Histogram,
    aggregate,
    classify_close_miss,
    joint_position_metric,
    length_difference_metric,
)
from havswarm.kinematics import HavConfig
from havswarm.simulator import ExperimentRecord, HavRecord


def hav(n=2, jack=False, goals=(True, True), steps=(100, 300), pot=False, act=False, hc=(0, 0), ec=(0, 0)):
    return HavRecord(
        trailer_count=n,
        truck_length=4.0,
        trailer_lengths=[3.0] * n,
        v_max=1.0,
        steering_limit=0.7,
        jackknifed=jack,
        jackknife_joints=[n] if jack else [],
        goal_hit=list(goals),
        goal_hit_step=[s if g else None for s, g in zip(steps, goals)],
        goal_hit_distance=[0.2 if g else None for g in goals],
        goal_hit_heading_diff=[0.05 if g else None for g in goals],
        heading_close_miss_steps=list(hc),
        euclidean_close_miss_steps=list(ec),
        potential_collision=pot,
        actual_collision=act,
    )


def record(index, havs, switch=150):
    return ExperimentRecord(seed=1, experiment_index=index, attempt=0, hav_count=len(havs), area_side=30.0,
                            phase_switch_step=switch, havs=havs)


class TestCloseMiss:
    def test_examples(self):
        assert classify_close_miss(0.3, 0.15) is CloseMiss.HEADING
        assert classify_close_miss(0.7, 0.05) is CloseMiss.EUCLIDEAN
        assert classify_close_miss(0.3, 0.05) is CloseMiss.NONE

    def test_boundaries(self):
        assert classify_close_miss(0.3, 0.1) is CloseMiss.HEADING
        assert classify_close_miss(0.3, 0.2) is CloseMiss.NONE
        assert classify_close_miss(0.5, 0.05) is CloseMiss.EUCLIDEAN
        assert classify_close_miss(1.0, 0.05) is CloseMiss.NONE

    @given(st.floats(0, 3), st.floats(0, 1))
    def test_exclusive_and_never_a_hit(self, d, h):
        c = classify_close_miss(d, h)
        if d < 0.5 and h < 0.1:
            assert c is CloseMiss.NONE
        if c is CloseMiss.HEADING:
            assert d < 0.5 and 0.1 <= h < 0.2
        if c is CloseMiss.EUCLIDEAN:
            assert h < 0.1 and 0.5 <= d < 1.0


class TestMetrics:
    def test_joint_position_example(self):
        assert joint_position_metric(HavConfig(4, (3, 3)), 1) == pytest.approx(0.4)

    def test_joint_position_uniform(self):
        c = HavConfig(2, (2,) * 5)
        assert joint_position_metric(c, 5) == pytest.approx(5 / 6)

    def test_joint_position_bounds(self):
        with pytest.raises(ValueError):
            joint_position_metric(HavConfig(4, (3,)), 2)

    @given(st.lists(st.floats(2, 12), min_size=3, max_size=8))
    def test_joint_position_increasing(self, ls):
        c = HavConfig(ls[0], tuple(ls[1:]))
        vals = [joint_position_metric(c, j) for j in range(1, c.trailer_count + 1)]
        assert all(0 < v < 1 for v in vals)
        assert vals == sorted(vals) and len(set(vals)) == len(vals)

    def test_length_difference_examples(self):
        assert length_difference_metric(HavConfig(3, (3, 3))) == 0
        assert length_difference_metric(HavConfig(2, (12,))) == pytest.approx(10 / 14)

    def test_length_difference_order_sensitive(self):
        assert length_difference_metric(HavConfig(2, (12, 2))) != length_difference_metric(HavConfig(2, (2, 12)))

    def test_metrics_accept_records(self):
        h = hav(n=2)
        assert joint_position_metric(h, 1) == joint_position_metric(HavConfig(4, (3, 3)), 1)


class TestHistogram:
    def test_csv_round_trip(self, tmp_path):
        h = Histogram("x", [0.0, 0.25, 0.5, 0.75, 1.0])
        h.add("a", [0.1, 0.2, 0.9, 1.0])
        h.add("b", [])
        h.write_csv(tmp_path / "x.csv")
        back = Histogram.read_csv(tmp_path / "x.csv")
        assert back.edges == h.edges
        assert back.counts == h.counts
        assert back.counts["a"] == [2, 0, 0, 2]


class TestAggregate:
    def test_no_jackknifes(self):
        recs = [record(i, [hav()]) for i in range(10)]
        assert aggregate(recs).rates("single_hav")["jackknife_rate"] == 0

    def test_per_hav_accounting(self):
        havs = [hav(jack=k < 95) for k in range(9000)]
        recs = [record(i, havs[2 * i:2 * i + 2]) for i in range(4500)]
        rates = aggregate(recs).rates("two_hav")
        assert rates["havs"] == 9000
        assert rates["jackknife_rate"] == pytest.approx(0.0106, abs=1e-4)

    def test_rates_and_histogram_totals(self):
        recs = [
            record(0, [hav(n=1)]),
            record(1, [hav(n=3, jack=True, goals=(True, False))]),
            record(2, [hav(n=3, goals=(False, False), hc=(4, 0), ec=(1, 0))], switch=None),
        ]
        report = aggregate(recs, max_steps=1000)
        c = report.cohorts["single_hav"]
        r = c["rates"]
        assert r["first_goal_rate"] == pytest.approx(2 / 3)
        assert r["second_goal_rate"] == pytest.approx(1 / 3)
        assert r["jackknife_rate"] == pytest.approx(1 / 3)
        assert c["close_miss"]["first_goal"]["heading_fraction"] == pytest.approx(0.8)
        assert c["close_miss"]["first_goal"]["missed_with_close_miss"] == 1
        for name, series in (("trailer_count", "all"), ("length_difference_metric", "all")):
            assert sum(c["histograms"][name]["counts"][series]) == 3
        assert c["histograms"]["trailer_count"]["counts"]["jackknifed"] == [0, 0, 1] + [0] * 7
        assert sum(c["histograms"]["joint_position_metric"]["counts"]["all_joints"]) == 7
        assert sum(c["histograms"]["goal_time_steps"]["counts"]["first_goal"]) == 2
        for v in r.values():
            if isinstance(v, float):
                assert 0 <= v <= 1

    def test_permutation_invariant(self):
        recs = [record(i, [hav(n=1 + i % 4, jack=i % 3 == 0, goals=(i % 2 == 0, i % 4 == 0))]) for i in range(20)]
        shuffled = recs[:]
        random.Random(0).shuffle(shuffled)
        assert aggregate(recs).to_dict() == aggregate(shuffled).to_dict()

    def test_cohorts_split_by_hav_count(self):
        recs = [record(0, [hav()]), record(1, [hav(), hav()])]
        assert set(aggregate(recs).cohorts) == {"single_hav", "two_hav"}

    def test_empty(self):
        with pytest.raises(ValueError):
            aggregate([])

    def test_write(self, tmp_path):
        aggregate([record(0, [hav()])]).write(tmp_path / "r.json", tmp_path / "h")
        assert (tmp_path / "r.json").exists()
        assert len(list((tmp_path / "h").glob("single_hav__*.csv"))) == 6
