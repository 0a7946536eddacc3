import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frspace import taylor as T
from frspace.errors import DomainError, ExpressionSyntaxError
from frspace.fields.expr import (
    BinOp,
    Call,
    Const,
    Neg,
    Num,
    Pow,
    Var,
    compile_expr,
    evaluate,
    max_variable,
    parse_expr,
    to_text,
)


@pytest.mark.parametrize(
    "text, x, expected",
    [
        ("1 + 2 * 3", [], 7.0),
        ("(1 + 2) * 3", [], 9.0),
        ("2^3^2", [], 512.0),
        ("-x1^2", [3.0], -9.0),
        ("x1 - x2 - x3", [1.0, 2.0, 3.0], -4.0),
        ("x1 / x2 / 2", [8.0, 2.0], 2.0),
        ("x1^(-2)", [2.0], 0.25),
        ("2 ^ -1", [], 0.5),
        ("sin(pi/2) + cos(0) + exp(0) + log(1) + sqrt(4) + atan(1)", [], 5.0 + math.pi / 4),
        ("1.5e-1 * .5", [], 0.075),
        ("x1 − 1", [3.0], 2.0),
    ],
)
def test_evaluation(text, x, expected):
    assert evaluate(parse_expr(text), x) == pytest.approx(expected, rel=1e-15)


def test_ast_shape():
    assert parse_expr("-x2^3 + 2*pi") == BinOp(
        "+", Neg(Pow(Var(2), 3)), BinOp("*", Num(2.0), Const("pi"))
    )
    assert parse_expr("sqrt(x1)") == Call("sqrt", Var(1))
    assert max_variable(parse_expr("x1 + sin(x4) * x2")) == 4
    assert max_variable(parse_expr("3")) == 0


@pytest.mark.parametrize(
    "text, line, column, fragment",
    [
        ("1 +", 1, 4, "end of input"),
        ("(1 + 2", 1, 7, "expected ')'"),
        ("x1 $ 2", 1, 4, "unexpected character"),
        ("foo(1)", 1, 1, "unknown name"),
        ("x1^0.5", 1, 4, "integer"),
        ("x1^x2", 1, 4, "integer"),
        ("1 2", 1, 3, "after complete"),
        ("", 1, 1, "empty"),
        ("1 +\n  * 2", 2, 3, "unexpected"),
        ("x0", 1, 1, "unknown name"),
    ],
)
def test_syntax_errors_carry_position(text, line, column, fragment):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expr(text, where="a[1][2]")
    err = info.value
    assert (err.line, err.column) == (line, column)
    assert fragment in str(err)
    assert str(err).startswith("a[1][2]: ")


@pytest.mark.parametrize(
    "text, x",
    [
        ("log(x1)", [0.0]),
        ("log(x1)", [-1.0]),
        ("sqrt(x1)", [-1e-3]),
        ("1 / (x1 - 1)", [1.0]),
        ("x1^(-1)", [0.0]),
    ],
)
def test_domain_errors(text, x):
    with pytest.raises(DomainError):
        evaluate(parse_expr(text), x)


def test_sqrt_of_zero_is_fine_for_floats_but_not_for_derivatives():
    e = parse_expr("sqrt(x1)")
    assert evaluate(e, [0.0]) == 0.0
    with pytest.raises(DomainError):
        evaluate(e, T.variables([0.0], 1))


def test_taylor_and_complex_evaluation_agree_with_analytic_derivative():
    e = parse_expr("exp(x1*x2) * atan(x2) / sqrt(1 + x1^2)")
    x0 = np.array([0.4, -0.7])
    t = evaluate(e, T.variables(x0, 1))
    h = 1e-100
    xc = x0[:, None] + 1j * h * np.eye(2)
    c = evaluate(e, xc)
    assert t.value == pytest.approx(c.real[0], rel=1e-15)
    grad = np.array([t.partial(0), t.partial(1)])
    assert np.allclose(grad, c.imag / h, rtol=1e-14)


# round trip ----------------------------------------------------------------------------

leaf = st.one_of(
    st.integers(0, 20).map(lambda v: Num(float(v))),
    st.sampled_from([Num(0.5), Num(2.25), Const("pi")]),
    st.integers(1, 4).map(Var),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(children, st.integers(-3, 4)).map(lambda t: Pow(*t)),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "atan"]), children).map(lambda t: Call(*t)),
    )


exprs = st.recursive(leaf, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(exprs)
def test_print_parse_round_trip(e):
    text = to_text(e)
    assert parse_expr(text) == e
    assert to_text(parse_expr(text)) == text


def test_printer_uses_minimal_parentheses():
    assert to_text(parse_expr("((x1 + x2)) * x3")) == "(x1 + x2) * x3"
    assert to_text(parse_expr("x1 - (x2 - x3)")) == "x1 - (x2 - x3)"
    assert to_text(parse_expr("(x1 - x2) - x3")) == "x1 - x2 - x3"
    assert to_text(parse_expr("(-x1)^2")) == "(-x1)^2"
    assert to_text(parse_expr("x1^(-2)")) == "x1^(-2)"


def test_compiled_closure_reused():
    f = compile_expr(parse_expr("x1 * x1 + 1"))
    assert [f([v]) for v in (0.0, 1.0, 2.0)] == [1.0, 2.0, 5.0]
