import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oculus.fuzzy.errors import DegenerateSetError
from oculus.fuzzy.inference import AggregatedFuzzySet, defuzzify_coa
from oculus.fuzzy.membership import shoulder_right, trapezoidal, triangular


def aggregate_for(partition, strengths):
    clipped = tuple(
        (mf, s) for (label, mf), s in zip(partition.labels, strengths) if s > 0.0
    )
    return AggregatedFuzzySet(partition.name, partition.universe, clipped)


def dense_trapezoid_centroid(aggset, resolution=100_001):
    """Independent oracle: ratio of trapezoid-rule integrals of x*mu and mu."""
    xs = aggset.grid(resolution)
    mu = aggset.sample(resolution)
    return np.trapezoid(xs * mu, xs) / np.trapezoid(mu, xs)


class TestReferencePoints:
    def test_constant_set_centers_on_universe_midpoint(self):
        flat = AggregatedFuzzySet(
            "y", (-50.0, 50.0), ((trapezoidal(-50, -50, 50, 50), 0.7),)
        )
        assert defuzzify_coa(flat) == pytest.approx(0.0, abs=1e-9)

    def test_rising_ramp_lands_at_two_thirds(self):
        # mu = x/30 on [0, 30]: exact centroid is 20.
        ramp = AggregatedFuzzySet("y", (0.0, 30.0), ((shoulder_right(0, 30), 1.0),))
        assert defuzzify_coa(ramp, resolution=101) == pytest.approx(20.0, abs=0.1)
        assert defuzzify_coa(ramp) == pytest.approx(20.0, abs=0.1)

    def test_clip_level_does_not_move_a_symmetric_set(self):
        mf = triangular(-10.0, 0.0, 10.0)
        for s in (0.2, 0.5, 1.0):
            agg = AggregatedFuzzySet("y", (-10.0, 10.0), ((mf, s),))
            assert defuzzify_coa(agg) == pytest.approx(0.0, abs=1e-9)


@given(
    c=st.floats(-100.0, 100.0),
    w=st.floats(0.1, 50.0),
    s=st.floats(0.05, 1.0),
)
def test_symmetric_triangle_centers_on_its_peak(c, w, s):
    agg = AggregatedFuzzySet("y", (c - w, c + w), ((triangular(c - w, c, c + w), s),))
    assert defuzzify_coa(agg) == pytest.approx(c, abs=1e-6)


@given(
    t=st.integers(-1000, 1000).map(float),
    s=st.floats(0.05, 1.0),
)
def test_translation_moves_centroid_by_the_shift(t, s):
    agg = AggregatedFuzzySet(
        "y", (-50.0, 50.0), ((triangular(-50.0, -20.0, 50.0), s),)
    )
    assert defuzzify_coa(agg.shifted(t)) == pytest.approx(
        defuzzify_coa(agg) + t, abs=1e-9
    )


@given(
    strengths=st.lists(st.floats(0.0, 1.0), min_size=5, max_size=5).filter(
        lambda ss: max(ss) > 0.05
    )
)
def test_centroid_stays_inside_the_universe(default_rulebase, strengths):
    part = default_rulebase.outputs["d_pl"]
    agg = aggregate_for(part, strengths)
    lo, hi = part.universe
    assert lo <= defuzzify_coa(agg) <= hi


def test_coarse_sampling_tracks_dense_oracle(default_rulebase):
    """Resolution 101 stays within 0.5 of the 100001-point centroid for
    random firing patterns over both output partitions."""
    rng = np.random.default_rng(2024)
    parts = [default_rulebase.outputs["d_pl"], default_rulebase.outputs["d_ar"]]
    worst = 0.0
    for i in range(200):
        part = parts[i % 2]
        strengths = rng.uniform(0.0, 1.0, size=len(part.labels))
        strengths[strengths < 0.05] = 0.0
        if strengths.max() == 0.0:
            strengths[rng.integers(len(strengths))] = 1.0
        agg = aggregate_for(part, strengths)
        coarse = defuzzify_coa(agg, resolution=101)
        dense = dense_trapezoid_centroid(agg)
        worst = max(worst, abs(coarse - dense))
    assert worst <= 0.5


class TestDegenerate:
    def test_zero_strength_everywhere_raises(self):
        agg = AggregatedFuzzySet("y", (0.0, 1.0), ())
        with pytest.raises(DegenerateSetError):
            defuzzify_coa(agg)

    def test_resolution_guard(self):
        agg = AggregatedFuzzySet("y", (0.0, 1.0), ((triangular(0, 0.5, 1), 1.0),))
        with pytest.raises(ValueError, match="resolution"):
            defuzzify_coa(agg, resolution=2)
