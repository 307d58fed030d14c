import random
from fractions import Fraction as F

import pytest
import sympy

from arrfrob.linforms import LinExpr, form_value, linear_form


def _sym_of_form(form, zs):
    return sum(sympy.Rational(c.numerator, c.denominator) * z for c, z in zip(form, zs))


def _sym_of_expr(expr, zs):
    total = sympy.Integer(0)
    for (powers, logf), coef in expr.terms.items():
        term = sympy.Rational(coef.numerator, coef.denominator)
        for form, exp in powers:
            term *= _sym_of_form(form, zs) ** exp
        if logf is not None:
            term *= sympy.log(_sym_of_form(logf, zs))
        total += term
    return total


def _random_expr(rng, nvars, with_log=False):
    expr = LinExpr.zero()
    for _ in range(rng.randint(1, 3)):
        powers = {}
        for _ in range(rng.randint(0, 2)):
            form = linear_form(
                [F(rng.randint(-3, 3)) for _ in range(nvars)]
            )
            if any(form):
                powers[form] = powers.get(form, 0) + rng.randint(1, 2)
        logf = None
        if with_log and rng.random() < 0.5:
            cand = linear_form([F(rng.randint(-2, 2)) for _ in range(nvars)])
            if any(cand):
                logf = cand
        coef = F(rng.randint(-4, 4), rng.randint(1, 3))
        if coef:
            expr = expr + LinExpr.monomial(coef, powers, log_form=logf)
    return expr


def test_form_value():
    form = linear_form([F(1), F(-2), F(3)])
    assert form_value(form, (F(1), F(1), F(1))) == F(2)


def test_diff_matches_sympy():
    rng = random.Random(17)
    zs = sympy.symbols("z1 z2 z3")
    for _ in range(30):
        expr = _random_expr(rng, 3, with_log=True)
        j = rng.randint(1, 3)
        ours = _sym_of_expr(expr.diff(j), zs)
        theirs = sympy.diff(_sym_of_expr(expr, zs), zs[j - 1])
        assert sympy.simplify(ours - theirs) == 0


def test_product_matches_sympy():
    rng = random.Random(23)
    zs = sympy.symbols("z1 z2")
    for _ in range(20):
        a = _random_expr(rng, 2)
        b = _random_expr(rng, 2)
        ours = _sym_of_expr(a * b, zs)
        theirs = _sym_of_expr(a, zs) * _sym_of_expr(b, zs)
        assert sympy.simplify(ours - theirs) == 0


def test_product_of_two_logs_rejected():
    form = linear_form([F(1), F(0)])
    a = LinExpr.monomial(F(1), {}, log_form=form)
    with pytest.raises(ValueError):
        a * a


def test_evaluate_exact_requires_log_free():
    form = linear_form([F(1), F(1)])
    expr = LinExpr.monomial(F(1), {form: 1}, log_form=form)
    with pytest.raises(ValueError):
        expr.evaluate_exact((F(1), F(1)))
    # after enough derivatives the log disappears: d^2/dz1^2 (f log f) = 1/f
    d = expr.diff(1).diff(1)
    assert not d.has_log()
    assert d.evaluate_exact((F(1), F(1))) == F(1, 2)


def test_evaluate_with_log_is_complex():
    import cmath

    form = linear_form([F(1), F(0)])
    expr = LinExpr.monomial(F(2), {}, log_form=form)
    val = expr.evaluate((F(3), F(0)))
    assert abs(val - 2 * cmath.log(3)) < 1e-14


def test_diff_path_commutes():
    rng = random.Random(31)
    for _ in range(10):
        expr = _random_expr(rng, 3, with_log=True)
        assert expr.diff_path((1, 2)).terms == expr.diff_path((2, 1)).terms
