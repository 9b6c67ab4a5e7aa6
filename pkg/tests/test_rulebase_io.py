import copy

import pytest

from oculus.fuzzy.errors import RuleBaseError
from oculus.fuzzy.rulebase import FuzzyRuleBase


def make_doc():
    """Smallest complete document: one input, one output, Ruspini shoulders."""
    return {
        "inputs": {
            "x": {
                "universe": [0.0, 1.0],
                "labels": [
                    {"name": "LOW", "shape": "shoulder-left", "params": [0.0, 1.0]},
                    {"name": "HIGH", "shape": "shoulder-right", "params": [0.0, 1.0]},
                ],
            }
        },
        "outputs": {
            "y": {
                "universe": [-1.0, 1.0],
                "labels": [
                    {"name": "NEG", "shape": "shoulder-left", "params": [-1.0, 1.0]},
                    {"name": "POS", "shape": "shoulder-right", "params": [-1.0, 1.0]},
                ],
            }
        },
        "rules": [
            {"if": {"x": "LOW"}, "then": {"y": "NEG"}},
            {"if": {"x": "HIGH"}, "then": {"y": "POS"}},
        ],
    }


class TestLoading:
    def test_packaged_default_shape(self, default_rulebase):
        assert default_rulebase.input_names == ("priority", "arousal")
        assert default_rulebase.output_names == ("d_pl", "d_ar")
        assert len(default_rulebase.rules) >= 3

    def test_minimal_doc_loads(self):
        rb = FuzzyRuleBase.from_dict(make_doc())
        assert rb.input_names == ("x",)
        assert rb.rules[0].weight == 1.0

    def test_json_roundtrip_is_identity(self):
        rb = FuzzyRuleBase.from_dict(make_doc())
        assert FuzzyRuleBase.from_json(rb.to_json()) == rb

    def test_default_roundtrips(self, default_rulebase):
        again = FuzzyRuleBase.from_json(default_rulebase.to_json())
        assert again == default_rulebase
        assert again.to_dict() == default_rulebase.to_dict()

    def test_load_from_file(self, tmp_path):
        rb = FuzzyRuleBase.from_dict(make_doc())
        path = tmp_path / "rb.json"
        path.write_text(rb.to_json(), encoding="utf-8")
        assert FuzzyRuleBase.load(path) == rb

    def test_explicit_weight_kept(self):
        doc = make_doc()
        doc["rules"][0]["weight"] = 0.5
        assert FuzzyRuleBase.from_dict(doc).rules[0].weight == 0.5


class TestStrictness:
    def test_unknown_top_level_field(self):
        doc = make_doc()
        doc["version"] = 2
        with pytest.raises(RuleBaseError, match="unknown field"):
            FuzzyRuleBase.from_dict(doc)

    def test_missing_top_level_field(self):
        doc = make_doc()
        del doc["rules"]
        with pytest.raises(RuleBaseError, match="missing field"):
            FuzzyRuleBase.from_dict(doc)

    def test_unknown_partition_field(self):
        doc = make_doc()
        doc["inputs"]["x"]["comment"] = "?"
        with pytest.raises(RuleBaseError, match="inputs.x"):
            FuzzyRuleBase.from_dict(doc)

    def test_unknown_label_field(self):
        doc = make_doc()
        doc["outputs"]["y"]["labels"][0]["color"] = "red"
        with pytest.raises(RuleBaseError, match="unknown field"):
            FuzzyRuleBase.from_dict(doc)

    def test_unknown_rule_field(self):
        doc = make_doc()
        doc["rules"][0]["unless"] = {}
        with pytest.raises(RuleBaseError, match=r"rules\[0\]"):
            FuzzyRuleBase.from_dict(doc)

    def test_unknown_shape(self):
        doc = make_doc()
        doc["inputs"]["x"]["labels"][0]["shape"] = "gaussian"
        with pytest.raises(RuleBaseError, match="unknown shape"):
            FuzzyRuleBase.from_dict(doc)

    def test_wrong_param_count_reported(self):
        doc = make_doc()
        doc["inputs"]["x"]["labels"][0]["params"] = [0.0]
        with pytest.raises(RuleBaseError, match="breakpoints"):
            FuzzyRuleBase.from_dict(doc)

    def test_universe_must_be_pair(self):
        doc = make_doc()
        doc["inputs"]["x"]["universe"] = [0.0]
        with pytest.raises(RuleBaseError, match="universe"):
            FuzzyRuleBase.from_dict(doc)

    def test_rules_must_be_list(self):
        doc = make_doc()
        doc["rules"] = {"if": {}, "then": {}}
        with pytest.raises(RuleBaseError, match="list"):
            FuzzyRuleBase.from_dict(doc)

    def test_document_must_be_object(self):
        with pytest.raises(RuleBaseError, match="object"):
            FuzzyRuleBase.from_json("[1, 2]")

    def test_invalid_json_rejected(self):
        with pytest.raises(RuleBaseError, match="JSON"):
            FuzzyRuleBase.from_json("{not json")


class TestRuleReferences:
    @pytest.mark.parametrize(
        "mutate, fragment",
        [
            (lambda r: r["if"].update({"z": "LOW"}), "unknown input"),
            (lambda r: r["if"].update({"x": "MID"}), "no label"),
            (lambda r: r["then"].update({"w": "POS"}), "unknown output"),
            (lambda r: r["then"].update({"y": "MID"}), "no label"),
        ],
    )
    def test_dangling_reference_rejected(self, mutate, fragment):
        doc = make_doc()
        mutate(doc["rules"][0])
        with pytest.raises(RuleBaseError, match=fragment):
            FuzzyRuleBase.from_dict(doc)

    def test_empty_antecedent_rejected(self):
        doc = make_doc()
        doc["rules"][0]["if"] = {}
        with pytest.raises(RuleBaseError, match="antecedent"):
            FuzzyRuleBase.from_dict(doc)

    def test_empty_consequent_rejected(self):
        doc = make_doc()
        doc["rules"][0]["then"] = {}
        with pytest.raises(RuleBaseError, match="consequent"):
            FuzzyRuleBase.from_dict(doc)


class TestWeights:
    @pytest.mark.parametrize("weight", [0.0, -0.5, 1.5])
    def test_out_of_range_weight_rejected(self, weight):
        doc = make_doc()
        doc["rules"][0]["weight"] = weight
        with pytest.raises(RuleBaseError, match="weight"):
            FuzzyRuleBase.from_dict(doc)

    def test_bool_weight_rejected(self):
        doc = make_doc()
        doc["rules"][0]["weight"] = True
        with pytest.raises(RuleBaseError, match="number"):
            FuzzyRuleBase.from_dict(doc)


class TestCompleteness:
    def test_gap_between_shoulders_detected(self):
        doc = make_doc()
        doc["inputs"]["x"]["labels"] = [
            {"name": "LOW", "shape": "shoulder-left", "params": [0.0, 0.4]},
            {"name": "HIGH", "shape": "shoulder-right", "params": [0.6, 1.0]},
        ]
        # Both memberships vanish on (0.4, 0.6): no rule can fire there.
        with pytest.raises(RuleBaseError, match="incomplete"):
            FuzzyRuleBase.from_dict(doc)

    def test_output_with_no_rules_detected(self):
        doc = make_doc()
        doc["outputs"]["z"] = copy.deepcopy(doc["outputs"]["y"])
        with pytest.raises(RuleBaseError, match="'z'"):
            FuzzyRuleBase.from_dict(doc)

    def test_no_rules_rejected(self):
        doc = make_doc()
        doc["rules"] = []
        with pytest.raises(RuleBaseError, match="no rules"):
            FuzzyRuleBase.from_dict(doc)
