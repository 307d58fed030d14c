"""Exact calculus for products of linear forms with optional log factors.

An expression is a finite sum of terms

    c * prod_f f(z)^(e_f) * [log g(z)]

where every f is a linear form sum_j c_j z_j with rational coefficients,
exponents are (possibly negative) integers, and a term carries at most one
logarithm. The family is closed under z-differentiation, which is the whole
point: repeated derivatives of f^(2k) log f eventually cancel every log
coefficient, after which evaluation is exact rational arithmetic.
"""

from __future__ import annotations

import cmath
from fractions import Fraction


def linear_form(coeffs):
    return tuple(Fraction(c) for c in coeffs)


def form_value(form, z):
    total = 0
    for c, zi in zip(form, z):
        if c:
            total += c * zi
    return total


class LinExpr:
    """Sum of rational multiples of monomials in linear forms, each term
    optionally multiplied by the log of one linear form."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        # key: (powers, logform) with powers a sorted tuple of (form, exp)
        self.terms = dict(terms) if terms else {}

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, value):
        out = cls()
        out._accumulate((), None, Fraction(value))
        return out

    @classmethod
    def monomial(cls, coef, powers, log_form=None):
        out = cls()
        clean = {}
        for form, exp in dict(powers).items():
            if exp:
                clean[linear_form(form)] = clean.get(linear_form(form), 0) + exp
        key = tuple(sorted((f, e) for f, e in clean.items() if e))
        out._accumulate(key, linear_form(log_form) if log_form else None, Fraction(coef))
        return out

    def _accumulate(self, powers, logform, coef):
        if coef == 0:
            return
        key = (powers, logform)
        new = self.terms.get(key, Fraction(0)) + coef
        if new == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    def is_zero(self):
        return not self.terms

    def has_log(self):
        return any(logform is not None for (_, logform) in self.terms)

    def __add__(self, other):
        out = LinExpr(self.terms)
        for (powers, logform), coef in other.terms.items():
            out._accumulate(powers, logform, coef)
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LinExpr({key: -c for key, c in self.terms.items()})

    def scale(self, scalar):
        scalar = Fraction(scalar)
        if scalar == 0:
            return LinExpr()
        return LinExpr({key: c * scalar for key, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, LinExpr):
            out = LinExpr()
            for (p1, l1), c1 in self.terms.items():
                for (p2, l2), c2 in other.terms.items():
                    if l1 is not None and l2 is not None:
                        raise ValueError("product would carry two log factors")
                    merged = dict(p1)
                    for form, exp in p2:
                        merged[form] = merged.get(form, 0) + exp
                    key = tuple(sorted((f, e) for f, e in merged.items() if e))
                    out._accumulate(key, l1 if l1 is not None else l2, c1 * c2)
            return out
        return self.scale(other)

    __rmul__ = __mul__

    def diff(self, j):
        """Derivative in z_j (1-based)."""
        out = LinExpr()
        for (powers, logform), coef in self.terms.items():
            for idx, (form, exp) in enumerate(powers):
                slope = form[j - 1]
                if not slope or not exp:
                    continue
                rest = list(powers)
                if exp == 1:
                    rest.pop(idx)
                else:
                    rest[idx] = (form, exp - 1)
                out._accumulate(tuple(rest), logform, coef * exp * slope)
            if logform is not None:
                slope = logform[j - 1]
                if slope:
                    merged = dict(powers)
                    merged[logform] = merged.get(logform, 0) - 1
                    key = tuple(sorted((f, e) for f, e in merged.items() if e))
                    out._accumulate(key, None, coef * slope)
        return out

    def diff_path(self, indices):
        expr = self
        for j in indices:
            expr = expr.diff(j)
        return expr

    def evaluate(self, z):
        """Value at z; exact Fraction when no log factor survives and z is
        rational, complex otherwise."""
        if not self.has_log():
            return self.evaluate_exact(z)
        total = complex(0)
        for (powers, logform), coef in self.terms.items():
            value = complex(coef)
            for form, exp in powers:
                value *= complex(form_value(form, z)) ** exp
            if logform is not None:
                value *= cmath.log(complex(form_value(logform, z)))
            total += value
        return total

    def evaluate_exact(self, z):
        """Exact rational value; raises if a log factor survives."""
        if self.has_log():
            raise ValueError("expression still carries a log factor")
        total = Fraction(0)
        for (powers, _), coef in self.terms.items():
            value = coef
            for form, exp in powers:
                base = form_value(form, z)
                if exp < 0:
                    value /= base ** (-exp)
                else:
                    value *= base**exp
            total += value
        return total

    def __repr__(self):
        return f"LinExpr({len(self.terms)} terms)"
