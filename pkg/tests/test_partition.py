import numpy as np
import pytest

from oculus.fuzzy.membership import shoulder_left, shoulder_right, triangular
from oculus.fuzzy.partition import FuzzyPartition, fuzzify


def two_label(name="toy", universe=(0.0, 1.0)):
    return FuzzyPartition(
        name,
        universe,
        (
            ("LOW", shoulder_left(universe[0], universe[1])),
            ("HIGH", shoulder_right(universe[0], universe[1])),
        ),
    )


class TestDefaults:
    def test_every_default_partition_is_ruspini(self, default_rulebase):
        parts = list(default_rulebase.inputs.values()) + list(
            default_rulebase.outputs.values()
        )
        for p in parts:
            assert p.is_ruspini(10001, 1e-9), p.name

    def test_arousal_partition_is_five_labels(self, default_rulebase):
        arousal = default_rulebase.inputs["arousal"]
        assert arousal.label_names == ("NB", "NS", "ZE", "PS", "PB")

    def test_output_halfway_down_negative_ramp(self, default_rulebase):
        d_pl = default_rulebase.outputs["d_pl"]
        degrees = dict(d_pl.fuzzify(-12.5))
        assert degrees["NS"] == 0.5
        assert degrees["ZE"] == 0.5
        assert degrees["NB"] == degrees["PS"] == degrees["PB"] == 0.0


class TestFuzzify:
    def test_preserves_label_order(self):
        p = two_label()
        assert [name for name, _ in p.fuzzify(0.25)] == ["LOW", "HIGH"]

    def test_lower_edge_activates_first_label_fully(self):
        p = two_label()
        assert dict(p.fuzzify(0.0)) == {"LOW": 1.0, "HIGH": 0.0}

    def test_out_of_universe_raises(self):
        p = two_label()
        with pytest.raises(ValueError):
            p.fuzzify(1.0001)
        with pytest.raises(ValueError):
            p.fuzzify(-0.0001)

    def test_functional_alias_matches_method(self):
        p = two_label()
        assert fuzzify(p, 0.3) == p.fuzzify(0.3)

    def test_degrees_matches_fuzzify(self):
        p = two_label()
        np.testing.assert_array_equal(
            p.degrees(0.7), [d for _, d in p.fuzzify(0.7)]
        )


class TestValidation:
    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            FuzzyPartition(
                "dup",
                (0.0, 1.0),
                (("A", shoulder_left(0, 1)), ("A", shoulder_right(0, 1))),
            )

    def test_support_outside_universe_rejected(self):
        with pytest.raises(ValueError, match="universe"):
            FuzzyPartition(
                "leaky", (0.0, 1.0), (("A", triangular(-0.5, 0.0, 1.0)),)
            )

    def test_empty_universe_rejected(self):
        with pytest.raises(ValueError):
            FuzzyPartition("flat", (1.0, 1.0), (("A", triangular(1, 1, 1)),))

    def test_no_labels_rejected(self):
        with pytest.raises(ValueError):
            FuzzyPartition("empty", (0.0, 1.0), ())

    def test_check_range_accepts_endpoints(self):
        p = two_label()
        assert p.check_range(0.0) == 0.0
        assert p.check_range(1.0) == 1.0


class TestHelpers:
    def test_grid_spans_universe(self):
        p = two_label(universe=(-2.0, 2.0))
        xs = p.grid(5)
        np.testing.assert_allclose(xs, [-2, -1, 0, 1, 2])

    def test_grid_too_coarse_rejected(self):
        with pytest.raises(ValueError):
            two_label().grid(1)

    def test_function_lookup_and_contains(self):
        p = two_label()
        assert p.function("LOW")(0.0) == 1.0
        assert "LOW" in p and "MID" not in p
        with pytest.raises(KeyError):
            p.function("MID")

    def test_non_ruspini_detected(self):
        gappy = FuzzyPartition(
            "gappy",
            (0.0, 1.0),
            (
                ("LOW", shoulder_left(0.0, 0.4)),
                ("HIGH", shoulder_right(0.6, 1.0)),
            ),
        )
        assert not gappy.is_ruspini()
