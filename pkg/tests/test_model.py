import random

import pytest

from hum.errors import ContradictoryEvidenceError, ModelError
from hum.model import Engine
from hum.oracle import all_probabilities, take_snapshot

from generators import random_model_ops, run_ops


def urn_engine():
    engine = Engine()
    engine.declare_variable("urn", ["h1", "h2", "h3"])
    engine.declare_variable(("draw", "?n"), ["white", "black"])
    engine.declare_relation("urn", ("draw", "?n"), [
        ("h1", [("white", 0.5), ("black", 0.5)]),
        ("h2", [("white", 1.0)]),
        ("h3", [("white", 0.0)]),
    ])
    engine.declare_marginal("urn", [0.33, 0.33, 0.33])
    return engine


def test_declare_variable_validations():
    engine = Engine()
    engine.declare_variable("urn", ["h1", "h2"])
    with pytest.raises(ModelError, match="already declared"):
        engine.declare_variable("urn", ["x"])
    with pytest.raises(ModelError, match="at least one value"):
        engine.declare_variable("empty", [])
    with pytest.raises(ModelError, match="duplicate"):
        engine.declare_variable("dup", ["a", "a"])
    # ground classes are instantiated on declaration
    assert "urn" in engine.instances


def test_declare_relation_validations():
    engine = Engine()
    engine.declare_variable("urn", ["h1", "h2"])
    engine.declare_variable(("draw", "?n"), ["white", "black"])
    with pytest.raises(ModelError, match="not declared"):
        engine.declare_relation("mystery", ("draw", "?n"), [("h1", [("white", 1.0)])])
    with pytest.raises(ModelError, match="not a value"):
        engine.declare_relation("urn", ("draw", "?n"), [("h1", [("green", 1.0)])])
    with pytest.raises(ModelError, match="more than 1"):
        engine.declare_relation("urn", ("draw", "?n"),
                                [("h1", [("white", 0.8), ("black", 0.8)])])


def test_rule_residual_mass_rules():
    engine = Engine()
    engine.declare_variable("p", ["y", "n"])
    engine.declare_variable(("c", "?k"), ["r", "g", "b"])
    # one omitted value takes the residual
    schema = engine.declare_relation("p", ("c", "?k"), [("y", [("r", 0.2), ("g", 0.5)])])
    assert schema.rules["y"]["b"] == pytest.approx(0.3)
    # a 1.0 entry zeroes every unlisted value
    schema2 = engine.declare_relation(("c", "?k"), "p", [("r", [("y", 1.0)])])
    assert schema2.rules["r"]["n"] == 0.0
    with pytest.raises(ModelError, match="unassigned"):
        engine.declare_variable(("d", "?k"), ["r", "g", "b"])
        engine.declare_relation("p", ("d", "?k"), [("y", [("r", 0.2)])])


def test_marginal_validations():
    engine = urn_engine()
    with pytest.raises(ModelError, match="already has a marginal"):
        engine.declare_marginal("urn", [0.5, 0.3, 0.2])
    with pytest.raises(ModelError, match="needs 2 weights"):
        engine.instantiate(("draw", 1))
        engine.declare_marginal(("draw", 1), [0.5, 0.3, 0.2])
    with pytest.raises(ModelError, match="not an instantiated"):
        engine.declare_marginal("nothing", [1.0])
    with pytest.raises(ModelError, match="nonnegative"):
        engine.declare_marginal(("draw", 1), [-0.1, 1.1])


def test_marginal_pair_form():
    engine = Engine()
    engine.declare_variable("urn", ["h1", "h2", "h3"])
    engine.declare_marginal("urn", {"h1": 0.33, "h2": 0.33, "h3": 0.33})
    assert engine.query_probability(("urn", "h2")) == pytest.approx(1 / 3)


def test_instantiate_validations():
    engine = urn_engine()
    engine.instantiate(("draw", 1))
    with pytest.raises(ModelError, match="already instantiated"):
        engine.instantiate(("draw", 1))
    with pytest.raises(ModelError, match="no declared variable"):
        engine.instantiate(("roll", 1))
    with pytest.raises(ModelError, match="not ground"):
        engine.instantiate(("draw", "?n"))


def test_urn_transcript_values():
    engine = urn_engine()
    assert engine.query_probability(("urn", "h2")) == pytest.approx(1 / 3)
    engine.instantiate(("draw", 1))
    assert engine.query_probability((("draw", 1), "white")) == pytest.approx(0.5)
    engine.assert_fact(((("draw", 1)), "white"))
    assert engine.query_probability(("urn", "h2")) == pytest.approx(2 / 3)
    engine.instantiate(("draw", 2))
    assert engine.query_probability((("draw", 2), "white")) == pytest.approx(5 / 6)
    engine.assert_fact(((("draw", 2)), "white"))
    assert engine.query_probability(("urn", "h2")) == pytest.approx(0.8)
    # the contradicted value is supported in no environment
    assert engine.network.node((("draw", 1), "black")).label == set()


def test_late_relation_applies_retroactively():
    engine = Engine()
    engine.declare_variable("urn", ["h1", "h2", "h3"])
    engine.declare_variable(("draw", "?n"), ["white", "black"])
    engine.declare_marginal("urn", [0.33, 0.33, 0.33])
    engine.instantiate(("draw", 1))
    engine.declare_relation("urn", ("draw", "?n"), [
        ("h1", [("white", 0.5), ("black", 0.5)]),
        ("h2", [("white", 1.0)]),
        ("h3", [("white", 0.0)]),
    ])
    assert engine.query_probability((("draw", 1), "white")) == pytest.approx(0.5)


def test_with_replacement_conditional_independence():
    engine = urn_engine()
    engine.instantiate(("draw", 1))
    engine.instantiate(("draw", 2))
    engine.assert_fact(("urn", "h1"))
    base = engine.query_probability((("draw", 2), "white"))
    engine.assert_fact(((("draw", 1)), "white"))
    assert engine.query_probability((("draw", 2), "white")) == pytest.approx(base)
    assert base == pytest.approx(0.5)


def test_observed_variable_is_deterministic():
    engine = urn_engine()
    engine.instantiate(("draw", 1))
    engine.assert_fact(((("draw", 1)), "white"))
    assert engine.query_probability((("draw", 1), "white")) == 1.0
    assert engine.query_probability((("draw", 1), "black")) == 0.0


def test_second_value_assertion_surfaces_at_query_time():
    engine = urn_engine()
    engine.instantiate(("draw", 1))
    engine.assert_fact(((("draw", 1)), "white"))
    engine.assert_fact(((("draw", 1)), "black"))  # allowed here
    with pytest.raises(ContradictoryEvidenceError):
        engine.query_probability(("urn", "h2"))


def test_reasserting_a_fact_is_a_no_op():
    engine = urn_engine()
    engine.instantiate(("draw", 1))
    engine.assert_fact(((("draw", 1)), "white"))
    before = engine.network.dump()
    engine.assert_fact(((("draw", 1)), "white"))
    assert engine.network.dump() == before


def test_unknown_proposition():
    engine = urn_engine()
    with pytest.raises(ModelError, match="unknown proposition"):
        engine.assert_fact(("urn", "h9"))
    with pytest.raises(ModelError, match="unknown proposition"):
        engine.query_probability(("moon", "full"))


def test_three_independent_reports_noisy_or():
    engine = Engine()
    engine.declare_variable("effect", ["yes", "no"])
    engine.declare_variable(("rep", "?n"), ["yes", "no"])
    engine.declare_variable(("source", ("rep", "?n")), ["upi", "ap", "ind"])
    engine.declare_relation(("rep", "?n"), "effect", [("yes", [("yes", 1.0)])])
    for n in (1, 2, 3):
        engine.instantiate(("rep", n))
        engine.instantiate(("source", ("rep", n)))
        engine.declare_marginal(("source", ("rep", n)), [0.33, 0.33, 0.34])
        engine.declare_marginal(("rep", n), [0.7, 0.3])
    assert engine.query_probability(("effect", "yes")) == pytest.approx(1 - 0.3 ** 3)


@pytest.mark.parametrize("seed", range(15))
def test_random_models_match_oracle(seed):
    rng = random.Random(31_000 + seed)
    ops = random_model_ops(rng)
    engine = run_ops(ops, check=lambda e: e.network.check_invariants())
    reference = all_probabilities(take_snapshot(engine.network, engine.space))
    for term in engine.value_terms():
        assert engine.query_probability(term) == pytest.approx(
            reference[term], abs=1e-9), term
