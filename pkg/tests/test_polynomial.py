"""Polynomial algebra, QUBO evaluation, gadget exactness, quadratization."""

import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quboinit.polynomial import (
    MissingVariableError,
    PseudoBooleanPolynomial,
    Qubo,
    ReductionMap,
    qubo_from_json,
    qubo_to_json,
    quadratize,
    rosenberg_gadget,
)

LABELS = tuple("abcdefghij")


def all_assignments(labels):
    labels = list(labels)
    for bits in itertools.product((0, 1), repeat=len(labels)):
        yield dict(zip(labels, bits))


def brute_poly_value(terms, constant, assignment):
    """Independent evaluator: plain sum of coeff * product over the term."""
    total = constant
    for key, coeff in terms.items():
        product = coeff
        for label in key:
            product *= assignment[label]
        total += product
    return total


# --- normalization ----------------------------------------------------------


def test_square_collapses_to_linear():
    poly = PseudoBooleanPolynomial({("x", "x"): 1.0})
    assert poly.terms == {("x",): 1.0}


def test_commutative_merge():
    poly = PseudoBooleanPolynomial()
    poly.add_term(("x", "y"), 2.0)
    poly.add_term(("y", "x"), 3.0)
    assert poly.terms == {("x", "y"): 5.0}


def test_cancellation_drops_term():
    poly = PseudoBooleanPolynomial({("x",): 1.0})
    poly.add_term(("x",), -1.0)
    assert poly.terms == {}
    assert poly.constant == 0.0


def test_explicit_zero_coefficient_dropped():
    poly = PseudoBooleanPolynomial({("x", "y"): 0.0})
    assert poly.terms == {}


@st.composite
def raw_polys(draw):
    n = draw(st.integers(1, 6))
    labels = LABELS[:n]
    n_terms = draw(st.integers(0, 8))
    terms = []
    for _ in range(n_terms):
        size = draw(st.integers(1, 4))
        key = tuple(draw(st.sampled_from(labels)) for _ in range(size))  # repeats allowed
        coeff = draw(st.integers(-9, 9))
        terms.append((key, float(coeff)))
    constant = float(draw(st.integers(-9, 9)))
    return labels, terms, constant


@given(raw_polys())
@settings(max_examples=60, deadline=None)
def test_normalization_preserves_evaluation(raw):
    labels, terms, constant = raw
    poly = PseudoBooleanPolynomial(constant=constant)
    for key, coeff in terms.items() if isinstance(terms, dict) else terms:
        poly.add_term(key, coeff)
    assert poly == poly.normalized()
    for assignment in all_assignments(labels):
        # oracle applies idempotence by evaluating the raw repeated-label terms
        expected = constant
        for key, coeff in terms:
            product = coeff
            for label in key:
                product *= assignment[label]
            expected += product
        assert poly.evaluate(assignment) == pytest.approx(expected, abs=1e-12)


def test_multilinearity_after_normalize():
    poly = PseudoBooleanPolynomial({("a", "a", "b"): 2.0, ("b", "a"): 1.0})
    for key in poly.terms:
        assert len(set(key)) == len(key)
    assert poly.terms == {("a", "b"): 3.0}


# --- evaluation -------------------------------------------------------------


def test_evaluate_examples():
    poly = PseudoBooleanPolynomial({("x", "y"): 2.0, ("x",): -1.0})
    assert poly.evaluate({"x": 1, "y": 1}) == 1.0
    cubic = PseudoBooleanPolynomial({("x", "y", "z"): 5.0})
    assert cubic.evaluate({"x": 1, "y": 1, "z": 0}) == 0.0
    constant = PseudoBooleanPolynomial(constant=7.0)
    assert constant.evaluate({}) == 7.0


def test_evaluate_missing_variable_names_label():
    poly = PseudoBooleanPolynomial({("x", "y"): 2.0})
    with pytest.raises(MissingVariableError, match="'y'"):
        poly.evaluate({"x": 0})


def test_product_matches_pointwise_values():
    left = PseudoBooleanPolynomial({("a",): 2.0, ("b", "c"): -1.0}, constant=1.0)
    right = PseudoBooleanPolynomial({("a", "b"): 3.0}, constant=-2.0)
    product = left * right
    for assignment in all_assignments("abc"):
        assert product.evaluate(assignment) == pytest.approx(
            left.evaluate(assignment) * right.evaluate(assignment)
        )


# --- QUBO -------------------------------------------------------------------


def test_qubo_energy_examples():
    qubo = Qubo(("x", "y"), {"x": 1.0, "y": 1.0}, {("x", "y"): -2.0}, offset=0.0)
    assert qubo.energy({"x": 1, "y": 1}) == 0.0
    assert qubo.energy({"x": 0, "y": 0}) == 0.0

    shifted = Qubo(("x",), {"x": 3.0}, {}, offset=4.5)
    assert shifted.energy({"x": 0}) == 4.5


def test_qubo_energy_matches_hand_sum_on_random_instance():
    rng = np.random.default_rng(3)
    labels = ("x", "y", "z")
    linear = {v: float(rng.integers(-4, 5)) for v in labels}
    quadratic = {
        ("x", "y"): float(rng.integers(-4, 5)),
        ("x", "z"): float(rng.integers(-4, 5)),
        ("y", "z"): float(rng.integers(-4, 5)),
    }
    offset = float(rng.integers(-4, 5))
    qubo = Qubo(labels, linear, quadratic, offset)
    for assignment in all_assignments(labels):
        expected = offset
        for v, c in linear.items():
            expected += c * assignment[v]
        for (a, b), c in quadratic.items():
            expected += c * assignment[a] * assignment[b]
        assert qubo.energy(assignment) == expected


def test_qubo_missing_variable():
    qubo = Qubo(("x", "y"), {"x": 1.0}, {}, 0.0)
    with pytest.raises(MissingVariableError, match="'y'"):
        qubo.energy({"x": 1})


def test_qubo_rejects_non_canonical_pairs():
    with pytest.raises(ValueError, match="canonical"):
        Qubo(("x", "y"), {}, {("y", "x"): 1.0}, 0.0)
    with pytest.raises(ValueError, match="canonical"):
        Qubo(("x",), {}, {("x", "x"): 1.0}, 0.0)


def test_from_polynomial_rejects_cubic():
    with pytest.raises(ValueError, match="degree"):
        Qubo.from_polynomial(PseudoBooleanPolynomial({("a", "b", "c"): 1.0}))


# --- gadget -----------------------------------------------------------------


def test_gadget_truth_table():
    weight = 1.0
    gadget = rosenberg_gadget("x", "y", "z", weight)
    for assignment in all_assignments("xyz"):
        value = gadget.evaluate(assignment)
        if assignment["z"] == assignment["x"] * assignment["y"]:
            assert value == 0.0
        else:
            assert value >= weight


def test_gadget_examples():
    assert rosenberg_gadget("x", "y", "z", 1.0).evaluate({"x": 1, "y": 1, "z": 1}) == 0.0
    assert rosenberg_gadget("x", "y", "z", 1.0).evaluate({"x": 1, "y": 1, "z": 0}) == 1.0
    assert rosenberg_gadget("x", "y", "z", 2.0).evaluate({"x": 0, "y": 0, "z": 1}) == 6.0


def test_gadget_rejects_bad_arguments():
    with pytest.raises(ValueError, match="positive"):
        rosenberg_gadget("x", "y", "z", 0.0)
    with pytest.raises(ValueError, match="distinct"):
        rosenberg_gadget("x", "x", "z", 1.0)


# --- quadratization ---------------------------------------------------------


def exhaustive_qubo_minimum(qubo):
    """Independent brute force over every variable, auxiliaries included."""
    best = None
    argmin = []
    for assignment in all_assignments(qubo.variables):
        energy = qubo.energy(assignment)
        if best is None or energy < best:
            best = energy
            argmin = [assignment]
        elif energy == best:
            argmin.append(assignment)
    return best, argmin


def test_degree_two_input_is_identity():
    poly = PseudoBooleanPolynomial({("x", "y"): 3.0})
    qubo, reduction = quadratize(poly)
    assert reduction.aux_defs == ()
    assert qubo.quadratic == {("x", "y"): 3.0}
    assert qubo.linear == {}
    assert qubo.offset == 0.0


def test_single_cubic_reduction_minima():
    poly = PseudoBooleanPolynomial({("x", "y", "z"): 1.0})
    qubo, reduction = quadratize(poly)
    assert len(reduction.aux_defs) == 1
    assert len(qubo.variables) == 4
    best, minimizers = exhaustive_qubo_minimum(qubo)
    assert best == 0.0
    projected = {
        tuple(sorted((k, v) for k, v in m.items() if k in ("x", "y", "z"))) for m in minimizers
    }
    poly_minimizers = {
        tuple(sorted(a.items()))
        for a in all_assignments("xyz")
        if poly.evaluate(a) == 0.0
    }
    assert projected == poly_minimizers


@pytest.mark.parametrize("seed", range(12))
def test_random_degree_four_reduction_is_sound(seed):
    rng = np.random.default_rng(seed)
    labels = LABELS[:6]
    poly = PseudoBooleanPolynomial()
    for _ in range(rng.integers(2, 6)):
        size = int(rng.integers(1, 5))
        key = tuple(rng.choice(labels, size=size, replace=False))
        coeff = int(rng.integers(-3, 4)) or 1
        poly.add_term(key, float(coeff))
    qubo, reduction = quadratize(poly)
    assert max((len(k) for k in poly.terms), default=0) <= 4

    poly_best = min(poly.evaluate(a) for a in all_assignments(poly.variables())) if poly.terms else poly.constant
    qubo_best, minimizers = exhaustive_qubo_minimum(qubo)
    assert qubo_best == poly_best
    # at every global minimizer the auxiliaries equal the product they replace
    for minimizer in minimizers:
        assert minimizer == reduction.extend(minimizer)


def test_fixed_penalty_weight_is_used():
    poly = PseudoBooleanPolynomial({("a", "b", "c"): 1.0})
    _, reduction = quadratize(poly, penalty_weight=9.0)
    assert reduction.aux_defs[0].weight == 9.0
    with pytest.raises(ValueError, match="positive"):
        quadratize(poly, penalty_weight=-1.0)


def test_auto_weight_dominates_pair_coefficients():
    poly = PseudoBooleanPolynomial({("a", "b", "c"): -4.0, ("a", "b", "d"): 2.0, ("a", "b"): 3.0})
    _, reduction = quadratize(poly)
    first = reduction.aux_defs[0]
    assert first.pair == ("a", "b")
    assert first.weight == 1.0 + 4.0 + 2.0 + 3.0


def test_quadratize_is_deterministic():
    poly = PseudoBooleanPolynomial(
        {("a", "b", "c"): 1.0, ("b", "c", "d"): -2.0, ("a", "c", "d", "e"): 3.0}
    )
    first = qubo_to_json(*quadratize(poly))
    second = qubo_to_json(*quadratize(poly))
    assert first == second


def test_aux_label_collision_is_rejected():
    poly = PseudoBooleanPolynomial({("a", "b", "c"): 1.0, ("a*b",): 1.0})
    with pytest.raises(ValueError, match="collides"):
        quadratize(poly)


def test_nested_reduction_extends_in_order():
    poly = PseudoBooleanPolynomial({("a", "b", "c", "d"): 1.0})
    qubo, reduction = quadratize(poly)
    assert len(reduction.aux_defs) == 2
    extended = reduction.extend({"a": 1, "b": 1, "c": 1, "d": 0})
    assert qubo.energy(extended) == poly.evaluate({"a": 1, "b": 1, "c": 1, "d": 0})


# --- serialization ----------------------------------------------------------


def test_json_round_trip_preserves_evaluation():
    poly = PseudoBooleanPolynomial({("a", "b", "c"): 2.0, ("a",): -1.5, ("b", "c"): 0.25})
    qubo, reduction = quadratize(poly)
    text = qubo_to_json(qubo, reduction, metadata={"note": "round-trip"})
    loaded, loaded_reduction, metadata = qubo_from_json(text)
    assert metadata == {"note": "round-trip"}
    assert loaded.variables == qubo.variables
    assert loaded_reduction == reduction
    for assignment in all_assignments(qubo.variables):
        assert loaded.energy(assignment) == qubo.energy(assignment)
    assert qubo_to_json(loaded, loaded_reduction, metadata) == text


def test_json_field_shapes():
    qubo = Qubo(("b", "a"), {"a": 1.0}, {("a", "b"): -2.0}, offset=0.5)
    doc = json.loads(qubo_to_json(qubo))
    assert doc["variables"] == ["b", "a"]
    assert doc["quadratic"] == [["a", "b", -2.0]]
    assert doc["offset"] == 0.5
    assert doc["reduction"] == []
