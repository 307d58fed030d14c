"""Critical points of the weighted log potential and the function algebra
on the critical set.

For a fiber z the potential is Phi = sum_j a_j log f_j with
f_j = z_j + sum_m b_j^m t_m. Its critical set in the arrangement complement
is finite (count C(n-1, k) for generic data) and the algebra of functions
on it carries a residue form (x, y) = sum_p x(p) y(p) / Hess(p).

Algebra elements are stored as coordinate vectors over the symbols w_T
(T a sorted independent k-subset), where w_T is the class of the function
(prod_{j in T} a_j) d_T / prod_{j in T} f_j. The generators [a_i/f_i]
multiply into the w-span with closed-form coefficients, and any degree-k
monomial in the generators reduces to the anchored basis
{w_T : anchor not in T} with z-independent rational coefficients.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import coords
from .osflag import CoVector, sort_with_sign


# ---------------------------------------------------------------------------
# linear data of a fiber


def f_values_at(family, z, t):
    """All n values f_j = z_j + sum_m b_j^m t_m."""
    zz = coords(z)
    return tuple(
        zz[j] + sum(family.b[j][m] * t[m] for m in range(family.k))
        for j in range(family.n)
    )


def f_minor_form(family, indices):
    """z-coefficients of the alternating (k+1)-index form
    sum_m (-1)^m z_{u_m} d_{u without u_m}."""
    u = tuple(indices)
    if len(u) != family.k + 1:
        raise ValueError(f"expected {family.k + 1} indices, got {len(u)}")
    coeffs = [Fraction(0)] * family.n
    for m, idx in enumerate(u):
        minor = family.minor(u[:m] + u[m + 1 :])
        if m % 2 == 0:
            coeffs[idx - 1] += minor
        else:
            coeffs[idx - 1] -= minor
    return tuple(coeffs)


def f_minor_value(family, z, indices):
    zz = coords(z)
    form = f_minor_form(family, indices)
    return sum(c * zz[j] for j, c in enumerate(form) if c)


# ---------------------------------------------------------------------------
# master function and critical points


class MasterFunction:
    """The potential Phi and its t-derivatives on a fixed fiber."""

    def __init__(self, family, z):
        self.family = family
        self.z = coords(z)

    def f_values(self, t):
        return f_values_at(self.family, self.z, t)

    def value(self, t):
        total = complex(0)
        for a, f in zip(self.family.a, self.f_values(t)):
            total += complex(a) * cmath.log(complex(f))
        return total

    def gradient(self, t):
        fam = self.family
        fs = self.f_values(t)
        return tuple(
            sum(fam.a[j] * fam.b[j][m] / fs[j] for j in range(fam.n))
            for m in range(fam.k)
        )

    def hessian_matrix(self, t):
        fam = self.family
        fs = self.f_values(t)
        return [
            [
                -sum(
                    fam.a[j] * fam.b[j][m] * fam.b[j][l] / (fs[j] * fs[j])
                    for j in range(fam.n)
                )
                for l in range(fam.k)
            ]
            for m in range(fam.k)
        ]

    def hessian_det(self, t):
        h = self.hessian_matrix(t)
        if self.family.k == 1:
            return h[0][0]
        if self.family.k == 2:
            return h[0][0] * h[1][1] - h[0][1] * h[1][0]
        return complex(np.linalg.det(np.array(h, dtype=complex)))


@dataclass(frozen=True)
class CriticalPoint:
    t: tuple
    f_values: tuple
    hessian: complex
    residual: float


def expected_critical_count(family):
    return math.comb(family.n - 1, family.k)


def _newton_polish(master, t0, max_iter=50):
    fam = master.family
    t = [complex(x) for x in t0]
    for _ in range(max_iter):
        try:
            grad = master.gradient(t)
        except ZeroDivisionError:
            return None
        res = max(abs(g) for g in grad)
        if res < 1e-13:
            break
        hess = master.hessian_matrix(t)
        if fam.k == 1:
            h = hess[0][0]
            if h == 0:
                return None
            step = [grad[0] / h]
        else:
            arr = np.array(hess, dtype=complex)
            try:
                step = list(np.linalg.solve(arr, np.array(grad, dtype=complex)))
            except np.linalg.LinAlgError:
                return None
        t = [ti - si for ti, si in zip(t, step)]
        if max(abs(s) for s in step) > 1e8:
            return None
    try:
        grad = master.gradient(t)
    except ZeroDivisionError:
        return None
    res = max(abs(g) for g in grad)
    if res > 1e-9:
        return None
    fs = tuple(complex(f) for f in master.f_values(t))
    if min(abs(f) for f in fs) < 1e-9:
        return None
    return CriticalPoint(
        t=tuple(t), f_values=fs, hessian=complex(master.hessian_det(t)), residual=res
    )


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        for j, qj in enumerate(q):
            out[i + j] += pi * qj
    return out


def _rationalize(value):
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, complex) and value.imag == 0:
        return Fraction(value.real)
    raise ValueError("critical solving needs real rational fiber coordinates")


def _solve_k1(family, z):
    zz = [_rationalize(v) for v in coords(z)]
    # clear denominators of sum_j a_j b_j / (z_j + b_j t): coefficients of
    # sum_j a_j b_j prod_{i != j} (z_i + b_i t), ascending powers of t
    factors = [[zz[j], family.b[j][0]] for j in range(family.n)]
    numer = [Fraction(0)]
    for j in range(family.n):
        term = [family.a[j] * family.b[j][0]]
        for i in range(family.n):
            if i != j:
                term = _poly_mul(term, factors[i])
        if len(term) > len(numer):
            numer += [Fraction(0)] * (len(term) - len(numer))
        for i, c in enumerate(term):
            numer[i] += c
    while len(numer) > 1 and numer[-1] == 0:
        numer.pop()
    if len(numer) <= 1:
        return []
    coeffs = [complex(c) for c in reversed(numer)]
    return [(root,) for root in np.roots(coeffs)]


def _pairwise_intersection_t1(family, zz):
    """First coordinates of all pairwise hyperplane intersections. These are
    always common zeros of the two gradient numerators (every term carries
    one of the two vanishing factors), so they show up as roots of the
    elimination resultant; they can pile up into high-multiplicity clusters
    (all pairs through a vertical line share t1), which would wreck the
    floating-point root finder unless stripped exactly."""
    vals = []
    for i, j in itertools.combinations(range(1, family.n + 1), 2):
        d = family.minor((i, j))
        if d == 0:
            continue
        bi, bj = family.b[i - 1], family.b[j - 1]
        vals.append((-zz[i - 1] * bj[1] + zz[j - 1] * bi[1]) / d)
    return vals


def _solve_k2(family, z):
    import sympy as sp

    zz = [_rationalize(v) for v in coords(z)]
    t1, t2 = sp.symbols("t1 t2")
    fs = [
        sp.Rational(zz[j]) + sp.Rational(family.b[j][0]) * t1 + sp.Rational(family.b[j][1]) * t2
        for j in range(family.n)
    ]
    polys = []
    for m in range(2):
        total = sp.Integer(0)
        for j in range(family.n):
            coef = sp.Rational(family.a[j] * family.b[j][m])
            if coef == 0:
                continue
            prod = coef
            for i in range(family.n):
                if i != j:
                    prod *= fs[i]
            total += prod
        polys.append(sp.expand(total))
    res = sp.resultant(sp.Poly(polys[0], t2), sp.Poly(polys[1], t2))
    res_poly = sp.Poly(res, t1, domain="QQ")
    # divide out the spurious pairwise-intersection roots exactly
    spurious = sp.Poly(1, t1, domain="QQ")
    for val in _pairwise_intersection_t1(family, zz):
        spurious *= sp.Poly([1, -sp.Rational(val)], t1, domain="QQ")
    quotient, remainder = sp.div(res_poly, spurious)
    if remainder.is_zero and quotient.degree() >= 1:
        res_poly = quotient
    coeffs = [complex(c) for c in res_poly.all_coeffs()]
    while len(coeffs) > 1 and abs(coeffs[0]) == 0:
        coeffs.pop(0)
    if len(coeffs) <= 1:
        return []
    candidates = []
    rows = [sp.Poly(p, t2) for p in polys]
    for r1 in np.roots(coeffs):
        for poly_row in rows:
            row = [
                complex(c.evalf(subs={t1: complex(r1)}))
                for c in poly_row.all_coeffs()
            ]
            scale = max(abs(c) for c in row)
            if scale == 0:
                continue
            trimmed = [c / scale for c in row]
            while len(trimmed) > 1 and abs(trimmed[0]) < 1e-12:
                trimmed.pop(0)
            if len(trimmed) <= 1:
                continue
            for r2 in np.roots(trimmed):
                candidates.append((complex(r1), complex(r2)))
    return candidates


def solve_critical(family, z, *, dedup_tol=1e-8):
    """All critical points of the potential on the fiber z.

    Raises RuntimeError with a 'degenerate critical set' diagnostic when a
    generic family does not produce the full count of distinct
    nondegenerate points.
    """
    if family.k > 2:
        raise ValueError("critical solving is supported for k <= 2")
    master = MasterFunction(family, [_rationalize(v) for v in coords(z)])
    seeds = _solve_k1(family, z) if family.k == 1 else _solve_k2(family, z)
    points = []
    for seed in seeds:
        point = _newton_polish(master, seed)
        if point is None:
            continue
        if any(
            max(abs(pa - pb) for pa, pb in zip(point.t, prev.t)) < dedup_tol
            for prev in points
        ):
            continue
        points.append(point)
    expected = expected_critical_count(family)
    if family.generic:
        if len(points) != expected:
            raise RuntimeError(
                f"degenerate critical set: found {len(points)} distinct critical "
                f"points, expected {expected}"
            )
        if any(abs(p.hessian) < 1e-12 for p in points):
            raise RuntimeError(
                "degenerate critical set: vanishing Hessian at a critical point"
            )
    return points


# ---------------------------------------------------------------------------
# the w-coordinate algebra


def independent_k_subsets(family):
    return family.flag_index.subsets


def anchored_subsets(family, anchor):
    return tuple(T for T in independent_k_subsets(family) if anchor not in T)


def default_anchor(family):
    return family.n


@lru_cache(maxsize=None)
def _elimination_row(family, pivot, tail):
    """Coefficients c_i with gen_pivot = sum_i c_i gen_i (i outside tail+pivot)
    from the contraction relation sum_i d_{(i,)+tail} gen_i = 0."""
    denom = family.minor((pivot,) + tail)
    if denom == 0:
        return None
    row = []
    for i in range(1, family.n + 1):
        if i == pivot or i in tail:
            continue
        num = family.minor((i,) + tail)
        if num:
            row.append((i, -num / denom))
    return tuple(row)


def _pick_tail(family, pivot, must_have, avoid):
    """A (k-1)-subset containing must_have, avoiding avoid and pivot, with a
    nonzero pivot minor."""
    must = tuple(sorted(must_have))
    pool = [
        i
        for i in range(1, family.n + 1)
        if i != pivot and i not in must and i not in avoid
    ]
    need = family.k - 1 - len(must)
    if need < 0:
        raise ValueError("monomial support too large for elimination")
    for extra in itertools.combinations(pool, need):
        tail = tuple(sorted(must + extra))
        if _elimination_row(family, pivot, tail) is not None:
            return tail
    raise ValueError(
        f"unsupported family: no invertible elimination pivot for index {pivot}"
    )


def _exponent_key(exponents):
    return tuple(sorted((i, e) for i, e in exponents.items() if e))


@lru_cache(maxsize=None)
def _reduce_sorted(family, anchor, key):
    exps = dict(key)
    degree = sum(exps.values())
    if degree != family.k:
        raise ValueError("reduction expects a degree-k monomial")
    support = sorted(exps)
    if exps.get(anchor):
        # eliminate one anchor factor
        rest = dict(exps)
        rest[anchor] -= 1
        must = [i for i in rest if rest[i] and i != anchor]
        tail = _pick_tail(family, anchor, must, avoid=())
        out = CoVector()
        for i, coef in _elimination_row(family, anchor, tail):
            child = dict(rest)
            child[i] = child.get(i, 0) + 1
            sub = _reduce_sorted(family, anchor, _exponent_key(child))
            out = out + sub * coef
        return out
    squares = [i for i in support if exps[i] >= 2]
    if not squares:
        T = tuple(support)
        minor = family.minor(T)
        if minor == 0:
            raise ValueError(f"unsupported family: dependent subset {T}")
        out = CoVector()
        out.accumulate(T, 1 / minor)
        return out
    pivot = squares[0]
    rest = dict(exps)
    rest[pivot] -= 1
    must = [i for i in rest if rest[i] and i != pivot]
    if anchor not in must:
        must.append(anchor)
    tail = _pick_tail(family, pivot, must, avoid=())
    out = CoVector()
    for i, coef in _elimination_row(family, pivot, tail):
        child = dict(rest)
        child[i] = child.get(i, 0) + 1
        sub = _reduce_sorted(family, anchor, _exponent_key(child))
        out = out + sub * coef
    return out


def reduce_to_w_basis(family, exponents, anchor=None):
    """Expand a degree-k monomial prod_i [a_i/f_i]^(e_i) over the anchored
    basis {w_T : anchor not in T}. The coefficients do not depend on the
    fiber."""
    if anchor is None:
        anchor = default_anchor(family)
    exps = dict(exponents)
    for i, e in exps.items():
        if not (1 <= i <= family.n) or e < 0:
            raise ValueError(f"bad exponent entry {i}: {e}")
    return _reduce_sorted(family, anchor, _exponent_key(exps))


def generator_times_w(family, z, i, wvec):
    """Product [a_i/f_i] * (w-span element) with closed-form coefficients."""
    out = CoVector()
    for T, coef in wvec.items():
        out = out + _gen_times_sorted(family, z, i, T) * coef
    return out


def _gen_times_sorted(family, z, i, T):
    n = family.n
    out = CoVector()
    if i not in T:
        u = (i,) + T
        denom = f_minor_value(family, z, u)
        if denom == 0:
            raise ValueError(
                f"fiber lies on the pole locus of the product rule at {u}"
            )
        scale = family.minor(T) / denom
        for ell, uell in enumerate(u):
            child = u[:ell] + u[ell + 1 :]
            if family.minor(tuple(sorted(child))) == 0:
                continue  # the w symbol of a dependent subset is zero
            coef = scale * family.a[uell - 1]
            out.accumulate(child, coef if ell % 2 == 0 else -coef)
        return out
    rest = tuple(x for x in T if x != i)
    _, sgn = sort_with_sign(rest + (i,))
    for s in range(1, n + 1):
        if s == i or s in rest:
            continue
        key, s_sgn = sort_with_sign(rest + (s,))
        if family.minor(key) == 0:
            continue
        out = out + _gen_times_sorted(family, z, i, key) * (-sgn * s_sgn)
    return out


def canonicalize(family, wvec, anchor=None):
    """Rewrite a w-span element over the anchored basis using the slot
    relation sum_s w_{R+(s)} = 0."""
    if anchor is None:
        anchor = default_anchor(family)
    out = CoVector()
    for T, coef in wvec.items():
        if anchor not in T:
            out.accumulate(T, coef)
            continue
        rest = tuple(x for x in T if x != anchor)
        _, sgn = sort_with_sign(rest + (anchor,))
        for s in range(1, family.n + 1):
            if s == anchor or s in rest:
                continue
            key, s_sgn = sort_with_sign(rest + (s,))
            if family.minor(key) == 0:
                continue
            out.accumulate(key, -sgn * s_sgn * coef)
    return out


def monomial_to_w(family, z, gens, anchor=None):
    """Class of prod [a_i/f_i] over the given generator indices (any number
    of factors) in the anchored basis."""
    if anchor is None:
        anchor = default_anchor(family)
    gens = tuple(gens)
    k = family.k
    if len(gens) == k:
        exps = {}
        for g in gens:
            exps[g] = exps.get(g, 0) + 1
        return reduce_to_w_basis(family, exps, anchor)
    if len(gens) > k:
        head, rest = gens[:k], gens[k:]
        out = monomial_to_w(family, z, head, anchor)
        for g in rest:
            out = generator_times_w(family, z, g, out)
        return canonicalize(family, out, anchor)
    # pad with the identity written as (1/|a|) sum_j z_j [a_j/f_j]
    zz = coords(z)
    pad = k - len(gens)
    scale = Fraction(1) / family.weight_sum**pad
    out = CoVector()
    for extra in itertools.product(range(1, family.n + 1), repeat=pad):
        coef = scale
        for j in extra:
            zj = zz[j - 1]
            if zj == 0:
                coef = 0
                break
            coef = coef * zj
        if coef == 0:
            continue
        exps = {}
        for g in gens + extra:
            exps[g] = exps.get(g, 0) + 1
        out = out + reduce_to_w_basis(family, exps, anchor) * coef
    return out


def identity_closed_form(family, z, anchor=None):
    """The unit of the algebra from the anchored minor expansion."""
    if anchor is None:
        anchor = default_anchor(family)
    zz = coords(z)
    out = CoVector()
    scale = Fraction(1) / family.weight_sum**family.k
    for T in anchored_subsets(family, anchor):
        u = (anchor,) + T
        denom = 1
        for m in range(len(u)):
            minor = family.minor(u[:m] + u[m + 1 :])
            if minor == 0:
                raise ValueError(
                    f"unsupported family: dependent subset inside {u}"
                )
            denom = denom * (minor if m % 2 == 0 else -minor)
        fval = f_minor_value(family, zz, u)
        out.accumulate(T, scale * fval**family.k / denom)
    return out


def identity_element(family, z, anchor=None, cross_check=False):
    """The unit of the algebra; optionally verify the closed form against
    the reduced k-th power of (1/|a|) sum_j z_j [a_j/f_j]."""
    if anchor is None:
        anchor = default_anchor(family)
    closed = identity_closed_form(family, z, anchor)
    if cross_check:
        reduced = monomial_to_w(family, z, (), anchor)
        if closed != reduced:
            raise RuntimeError("identity element routes disagree")
    return closed


def multiply(family, z, x, y, anchor=None):
    """Product of two w-span elements, in anchored coordinates."""
    out = CoVector()
    for T, coef in x.items():
        minor = family.minor(T)
        acc = y * (coef * minor)
        for g in T:
            acc = generator_times_w(family, z, g, acc)
        out = out + acc
    return canonicalize(family, out, anchor)


# ---------------------------------------------------------------------------
# evaluation and pairings


def w_value(family, T, point):
    """Value of w_T at a critical point."""
    value = family.minor(T)
    for j in T:
        value = value * family.a[j - 1] / point.f_values[j - 1]
    return complex(value)


def evaluate(family, wvec, point):
    """Value of a w-span element at a critical point."""
    total = complex(0)
    for T, coef in wvec.items():
        total += complex(coef) * w_value(family, T, point)
    return total


def evaluation_matrix(family, points, anchor=None):
    """Matrix of anchored basis values at the critical points, with its
    condition number."""
    if anchor is None:
        anchor = default_anchor(family)
    basis = anchored_subsets(family, anchor)
    mat = np.array(
        [[w_value(family, T, p) for T in basis] for p in points], dtype=complex
    )
    cond = float(np.linalg.cond(mat)) if mat.size else float("inf")
    return mat, cond


def residue_pairing_analytic(family, z, x, y, points=None):
    """(x, y) = sum over critical points of x(p) y(p) / Hess(p)."""
    if points is None:
        points = solve_critical(family, z)
    total = complex(0)
    for p in points:
        total += evaluate(family, x, p) * evaluate(family, y, p) / p.hessian
    return total


def structural_pairing(family, x, y):
    """(-1)^k S(nu x, nu y) with nu the w-to-v coordinate identification;
    fiber-independent by construction."""
    from .osflag import gram_v

    total = Fraction(0)
    for T, ct in x.items():
        for U, cu in y.items():
            g = gram_v(family, T, U)
            if g:
                total += ct * cu * g
    return total if family.k % 2 == 0 else -total


def euler_residual(family, z, points):
    """Max deviation of sum_j z_j a_j / f_j(p) from the total weight."""
    zz = coords(z)
    worst = 0.0
    for p in points:
        val = sum(
            complex(zz[j]) * complex(family.a[j]) / p.f_values[j]
            for j in range(family.n)
        )
        worst = max(worst, abs(val - complex(family.weight_sum)))
    return worst
