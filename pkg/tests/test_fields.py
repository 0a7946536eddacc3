import json

import numpy as np
import pytest

from frspace.errors import (
    AsymmetricMetric,
    DimensionMismatch,
    DomainError,
    ExpressionSyntaxError,
    FieldError,
    NotPositiveDefinite,
)
from frspace.fields import (
    BoxSampler,
    bundled_field,
    bundled_fields,
    field_from_dict,
    finite_difference_jet,
    jet_at,
    load_field,
    parse_field,
    validate_field,
)

BUNDLED = ["berwald", "berwald_riemann", "flat", "generic", "generic2d"]


def _spec(**over):
    d = {"dim": 2, "a": [["1", "0"], ["0", "1 + x1^2"]], "b": ["0.3", "0.1*x2"], "g": "0.5"}
    d.update(over)
    return d


def test_bundled_catalogue():
    assert bundled_fields() == BUNDLED
    with pytest.raises(FieldError, match="available"):
        bundled_field("nope")


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_fields_are_valid_on_the_unit_box(name):
    rep = validate_field(bundled_field(name), BoxSampler(-1.0, 1.0, count=64, seed=1))
    assert rep["pass"], rep["n_fail"]
    assert rep["count"] == 64


@pytest.mark.parametrize("name", BUNDLED)
def test_jet_routes_agree(name):
    field = bundled_field(name)
    x = np.linspace(-0.4, 0.3, field.dim)
    jt = jet_at(field, x, method="taylor")
    jc = jet_at(field, x, method="complex")
    da, db, dg = finite_difference_jet(field, x)
    assert np.allclose(jt.da, jc.da, atol=1e-13) and np.allclose(jt.db, jc.db, atol=1e-13)
    assert np.allclose(jt.dg, jc.dg, atol=1e-13)
    assert np.allclose(jt.da, da, atol=1e-7) and np.allclose(jt.db, db, atol=1e-7)
    assert np.allclose(jt.dg, dg, atol=1e-7)
    a, b, g = field.evaluate(x)
    assert np.array_equal(jt.a, a) and np.array_equal(jt.b, b) and jt.g == g


def test_json_round_trip(tmp_path):
    field = bundled_field("generic")
    again = parse_field(field.to_json())
    assert again == field
    p = tmp_path / "f.json"
    p.write_text(field.to_json())
    assert load_field(p) == field


def test_null_lower_triangle_is_mirrored():
    f = field_from_dict(_spec(a=[["1", "0.1*x1"], [None, "2"]]))
    a, _, _ = f.evaluate([0.5, 0.0])
    assert a[1, 0] == a[0, 1] == 0.05


def test_asymmetric_entries_rejected():
    with pytest.raises(AsymmetricMetric):
        field_from_dict(_spec(a=[["1", "0.1*x1"], ["0.2*x1", "2"]]))
    # same tree, different spelling is accepted
    field_from_dict(_spec(a=[["1", "0.1*x1"], ["(0.1 * x1)", "2"]]))


@pytest.mark.parametrize(
    "over, exc",
    [
        ({"dim": 1}, DimensionMismatch),
        ({"dim": 3}, DimensionMismatch),
        ({"b": ["1"]}, DimensionMismatch),
        ({"g": "x3"}, DimensionMismatch),
        ({"g": "1 +"}, ExpressionSyntaxError),
        ({"a": [["1", None], [None, "1"]]}, FieldError),
    ],
)
def test_malformed_definitions(over, exc):
    with pytest.raises(exc):
        field_from_dict(_spec(**over))


def test_json_syntax_error_position():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_field('{"dim": 2,\n "a": [}')
    assert info.value.line == 2 and info.value.where == "json"


def test_expression_error_names_its_entry():
    with pytest.raises(ExpressionSyntaxError, match=r"b\[2\]"):
        field_from_dict(_spec(b=["0.3", "2 * * x1"]))


def test_domain_failures_surface_in_jets_and_validation():
    f = field_from_dict(_spec(g="log(x1)"))
    with pytest.raises(DomainError):
        jet_at(f, [-0.5, 0.0])
    rep = validate_field(f, BoxSampler(-1.0, 1.0, count=16))
    assert not rep["pass"] and rep["domain_failures"]
    bad = field_from_dict(_spec(a=[["1", "0"], ["0", "x1"]]))
    rep = validate_field(bad, BoxSampler(-1.0, 1.0, count=16))
    assert rep["spd_failures"]
    with pytest.raises(NotPositiveDefinite):
        jet_at(bad, [-0.5, 0.0])
    big = field_from_dict(_spec(b=["0.8 + x1", "0"]))
    rep = validate_field(big, BoxSampler(0.5, 1.0, count=8))
    assert len(rep["c_failures"]) == 8


def test_sampler_is_deterministic_and_in_box():
    s = BoxSampler((-1, 0), (1, 2), count=32, seed=4)
    p1, p2 = s.points(2), s.points(2)
    assert np.array_equal(p1, p2)
    assert (p1[:, 0] >= -1).all() and (p1[:, 1] <= 2).all()
    with pytest.raises(ValueError):
        BoxSampler(1, 0).points(2)


def test_report_is_json_serialisable():
    rep = validate_field(bundled_field("flat"), BoxSampler(-1, 1, count=4))
    json.dumps(rep)
