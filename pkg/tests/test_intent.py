import statistics

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oculus.fuzzy.rulebase import FuzzyRuleBase
from oculus.intent import (
    IntentConfig,
    IntentContractError,
    RecommendationEvent,
    compute_delta,
    normalize_priority,
    step,
)
from oculus.mentality import MentalityState, grid_states

states = st.builds(
    MentalityState,
    x_pl=st.floats(-200.0, 200.0),
    x_ar=st.floats(-200.0, 200.0),
)
grades = st.integers(1, 6)


@pytest.fixture(scope="module")
def configs(backend_name):
    return IntentConfig.default(backend=backend_name)


class TestRecommendationEvent:
    @pytest.mark.parametrize("bad", [0, 7, -3, True, False, 2.5, "4", None])
    def test_invalid_priority_rejected(self, bad):
        with pytest.raises(ValueError):
            RecommendationEvent(priority=bad)

    def test_valid_range_accepted(self):
        for g in range(1, 7):
            assert RecommendationEvent(priority=g).priority == g

    def test_carries_item_and_timestamp(self):
        e = RecommendationEvent(priority=5, item_id="book-1", timestamp_ms=120)
        assert (e.item_id, e.timestamp_ms) == ("book-1", 120)


class TestNormalizePriority:
    def test_grade_endpoints_and_steps(self):
        assert [normalize_priority(g) for g in range(1, 7)] == [
            0.0,
            0.2,
            0.4,
            0.6,
            0.8,
            1.0,
        ]

    @pytest.mark.parametrize("bad", [0, 7])
    def test_out_of_range_rejected(self, bad):
        with pytest.raises(ValueError):
            normalize_priority(bad)


class TestContract:
    def test_default_rulebase_satisfies_contract(self, default_config):
        assert default_config.rulebase.input_names == ("priority", "arousal")

    def test_wrong_input_name_rejected(self, default_rulebase):
        doc = default_rulebase.to_dict()
        doc["inputs"]["mood"] = doc["inputs"].pop("arousal")
        doc["rules"] = [
            {
                "if": {k if k != "arousal" else "mood": v for k, v in r["if"].items()},
                "then": r["then"],
                "weight": r["weight"],
            }
            for r in doc["rules"]
        ]
        with pytest.raises(IntentContractError, match="inputs"):
            IntentConfig(FuzzyRuleBase.from_dict(doc))

    def test_wrong_output_universe_rejected(self, default_rulebase):
        doc = default_rulebase.to_dict()
        doc["outputs"]["d_pl"]["universe"] = [-60.0, 60.0]
        for label in doc["outputs"]["d_pl"]["labels"]:
            label["params"] = [p * 1.2 for p in label["params"]]
        with pytest.raises(IntentContractError, match="universe"):
            IntentConfig(FuzzyRuleBase.from_dict(doc))

    def test_missing_output_rejected(self, default_rulebase):
        doc = default_rulebase.to_dict()
        del doc["outputs"]["d_ar"]
        doc["rules"] = [
            {
                "if": r["if"],
                "then": {k: v for k, v in r["then"].items() if k != "d_ar"},
                "weight": r["weight"],
            }
            for r in doc["rules"]
        ]
        doc["rules"] = [r for r in doc["rules"] if r["then"]]
        with pytest.raises(IntentContractError, match="outputs"):
            IntentConfig(FuzzyRuleBase.from_dict(doc))

    def test_from_file_roundtrip(self, default_rulebase, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(default_rulebase.to_json(), encoding="utf-8")
        cfg = IntentConfig.from_file(path)
        assert cfg.rulebase == default_rulebase


class TestGoldenDeltas:
    """Hand-checked centroids for the shipped rules at neutral arousal."""

    def test_strong_recommendation_from_neutral(self, configs):
        d = compute_delta(MentalityState(0.0, 0.0), RecommendationEvent(6), configs)
        # Only the HIGH rule fires: d_pl is the full PS triangle (centroid
        # exactly 25), d_ar the PB shoulder (analytic 41.666..; sampling at
        # 1001 points shifts it by ~1e-4).
        assert d.d_pl == pytest.approx(25.0, abs=1e-9)
        assert d.d_ar == pytest.approx(41.6668, abs=1e-3)
        assert d.d_ar > d.d_pl > 0.0

    def test_weak_recommendation_from_neutral(self, configs):
        d = compute_delta(MentalityState(0.0, 0.0), RecommendationEvent(1), configs)
        assert d.d_pl == pytest.approx(-25.0, abs=1e-9)
        assert d.d_ar == pytest.approx(-25.0, abs=1e-9)

    def test_mid_grades_are_fixed_points(self, configs):
        for g in (3, 4):
            d = compute_delta(MentalityState(0.0, 0.0), RecommendationEvent(g), configs)
            assert d.d_pl == pytest.approx(0.0, abs=1e-9)
            assert d.d_ar == pytest.approx(0.0, abs=1e-9)

    def test_between_grade_midpoint_is_balanced(self, configs):
        # Halfway between the LOW and HIGH plateaus the push cancels.
        d = configs.delta_at(MentalityState(0.0, 0.0), 0.5)
        assert d.d_pl == pytest.approx(0.0, abs=1e-6)
        assert d.d_ar == pytest.approx(0.0, abs=1e-6)

    def test_antisaturation_softens_extreme_arousal(self, configs):
        pushed = compute_delta(MentalityState(0.0, 0.0), RecommendationEvent(6), configs)
        softened = compute_delta(
            MentalityState(0.0, 200.0), RecommendationEvent(6), configs
        )
        assert 0.0 < softened.d_ar < pushed.d_ar

    def test_arousal_moves_at_least_as_much_as_pleasure(self, configs):
        # Across the extreme grades the arousal axis reacts more strongly.
        mags = []
        for g in (1, 6):
            d = compute_delta(MentalityState(0.0, 0.0), RecommendationEvent(g), configs)
            mags.append((abs(d.d_ar), abs(d.d_pl)))
        mean_ar = statistics.mean(m[0] for m in mags)
        mean_pl = statistics.mean(m[1] for m in mags)
        assert mean_ar >= mean_pl


class TestStep:
    def test_saturated_state_stays_put(self, configs):
        s = MentalityState(200.0, 200.0)
        s2 = step(s, RecommendationEvent(6), configs)
        assert (s2.x_pl, s2.x_ar) == (200.0, 200.0)

    def test_replayed_praise_is_monotone_in_arousal(self, configs):
        s = MentalityState(0.0, -150.0)
        path = [s.x_ar]
        for _ in range(10):
            s = step(s, RecommendationEvent(6), configs)
            path.append(s.x_ar)
        assert all(b >= a for a, b in zip(path, path[1:]))
        assert path[-1] > 150.0

    def test_affinity_is_untouched(self, configs):
        s = MentalityState(0.0, 0.0, x_af=120.0)
        s2 = step(s, RecommendationEvent(6), configs)
        assert s2.x_af == 120.0


@given(state=states, grade=grades)
def test_delta_always_within_output_universe(default_config, state, grade):
    d = compute_delta(state, RecommendationEvent(grade), default_config)
    assert -50.0 <= d.d_pl <= 50.0
    assert -50.0 <= d.d_ar <= 50.0


@given(state=states, grade=grades)
def test_step_always_lands_in_bounds(default_config, state, grade):
    s2 = step(state, RecommendationEvent(grade), default_config)
    assert -200.0 <= s2.x_pl <= 200.0
    assert -200.0 <= s2.x_ar <= 200.0


def test_same_event_same_state_same_delta(configs):
    s = MentalityState(-37.0, 81.0)
    e = RecommendationEvent(5)
    first = compute_delta(s, e, configs)
    for _ in range(5):
        again = compute_delta(s, e, configs)
        assert (again.d_pl, again.d_ar) == (first.d_pl, first.d_ar)


def test_grade_monotonicity_across_grid(configs):
    # At every grid state, a better grade never yields a smaller delta.
    for s in grid_states():
        deltas = [
            compute_delta(s, RecommendationEvent(g), configs) for g in range(1, 7)
        ]
        for a, b in zip(deltas, deltas[1:]):
            assert b.d_pl >= a.d_pl - 1e-9
            assert b.d_ar >= a.d_ar - 1e-9
