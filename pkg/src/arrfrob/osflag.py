"""Flag space of a normal-crossing fiber.

The space V has the standard basis F_T indexed by independent sorted
k-subsets T. Unsorted index tuples resolve by permutation parity; a tuple
with a repeated index is zero. On this basis the weight form S is diagonal,
S(F_T, F_T) = prod_{j in T} a_j.

This module builds the singular subspace (the exact kernel of the weight
conditions), the orthogonal projection onto it, and the distinguished
singular vectors v_T together with their closed-form Gram values.

Sign convention: for k = 1 the distinguished vector is
v_j = -F_j + (a_j/|a|) sum_i F_i (leading minus), while for k >= 2 it is
v_T = F_T - sum_m (a_{i_m}/|a|) sum_j F_{..j..} (leading plus). The two
conventions are kept exactly as-is; downstream k=1 closed forms all use
the first one.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from . import linalg
from .core import coords, format_rational, parse_rational


def sort_with_sign(indices):
    """Sort an index tuple, returning (sorted_tuple, parity_sign).

    The sign is (-1)^(number of inversions); a repeated index gives sign 0.
    """
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(idx)):
        if idx[i - 1] == idx[i]:
            return tuple(idx), 0
    return tuple(idx), sign


class IndexedVector:
    """Sparse vector over sorted index tuples with skew-symmetric access."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        if coeffs:
            for key, val in coeffs.items():
                self.accumulate(key, val)

    def accumulate(self, indices, value):
        key, sign = sort_with_sign(tuple(indices))
        if sign == 0 or value == 0:
            return
        cur = self.coeffs.get(key, 0)
        new = cur + (value if sign == 1 else -value)
        if new == 0:
            self.coeffs.pop(key, None)
        else:
            self.coeffs[key] = new

    @classmethod
    def basis(cls, indices):
        return cls({tuple(indices): Fraction(1)})

    @classmethod
    def zero(cls):
        return cls()

    def get(self, indices):
        key, sign = sort_with_sign(tuple(indices))
        if sign == 0:
            return Fraction(0)
        val = self.coeffs.get(key, Fraction(0))
        return val if sign == 1 else -val

    def items(self):
        return self.coeffs.items()

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        out = type(self)()
        out.coeffs = dict(self.coeffs)
        for key, val in other.coeffs.items():
            out.accumulate(key, val)
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = type(self)()
        out.coeffs = {key: -val for key, val in self.coeffs.items()}
        return out

    def __mul__(self, scalar):
        if scalar == 0:
            return type(self)()
        out = type(self)()
        out.coeffs = {key: val * scalar for key, val in self.coeffs.items()}
        return out

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, IndexedVector):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        terms = ", ".join(f"{key}: {val}" for key, val in sorted(self.coeffs.items()))
        return f"{type(self).__name__}({{{terms}}})"

    def norm_inf(self):
        return max((abs(complex(v)) for v in self.coeffs.values()), default=0.0)

    def to_coordinates(self, subset_index):
        return [self.coeffs.get(s, Fraction(0)) for s in subset_index]

    @classmethod
    def from_coordinates(cls, subset_index, values):
        out = cls()
        for subset, val in zip(subset_index, values):
            if val != 0:
                out.coeffs[subset] = val
        return out

    def to_json(self):
        rows = []
        for key in sorted(self.coeffs):
            val = self.coeffs[key]
            if isinstance(val, Fraction) or isinstance(val, int):
                coeff = format_rational(val)
            else:
                val = complex(val)
                coeff = [val.real, val.imag]
            rows.append({"indices": list(key), "coeff": coeff})
        return rows

    @classmethod
    def from_json(cls, rows):
        out = cls()
        for row in rows:
            coeff = row["coeff"]
            if isinstance(coeff, list):
                value = complex(coeff[0], coeff[1])
            else:
                value = parse_rational(coeff)
            out.accumulate(tuple(row["indices"]), value)
        return out


class FlagVector(IndexedVector):
    """Element of V in the standard basis F_T."""


class CoVector(IndexedVector):
    """Element of the dual space (top-degree logarithmic forms)."""


def max_abs_diff(u, w):
    keys = set(u.coeffs) | set(w.coeffs)
    return max(
        (abs(complex(u.coeffs.get(k, 0)) - complex(w.coeffs.get(k, 0))) for k in keys),
        default=0.0,
    )


def weight_product(family, indices):
    prod = Fraction(1)
    for j in indices:
        prod *= family.a[j - 1]
    return prod


def contravariant_pairing(u, w, family):
    """S(u, w) = sum over sorted independent k-subsets of u_T w_T prod a_j."""
    small, large = (u, w) if len(u.coeffs) <= len(w.coeffs) else (w, u)
    total = Fraction(0)
    for key, val in small.coeffs.items():
        other = large.coeffs.get(key)
        if other:
            total += val * other * weight_product(family, key)
    return total


class SingularSubspace:
    """Kernel of the weight conditions sum_j a_j c_{(j,)+T'} = 0 over all
    independent (k-1)-subsets T', with an exact basis and Gram matrix."""

    def __init__(self, family):
        self.family = family
        index = family.flag_index
        conditions = []
        for tail in _independent_subsets(family, family.k - 1):
            row = [Fraction(0)] * len(index)
            for j in range(1, family.n + 1):
                key, sign = sort_with_sign((j,) + tail)
                if sign == 0 or key not in index:
                    continue
                row[index.position(key)] += family.a[j - 1] * sign
            conditions.append(row)
        self.conditions = conditions
        kernel = linalg.nullspace(conditions, len(index))
        self.basis = tuple(
            FlagVector.from_coordinates(index.subsets, vec) for vec in kernel
        )
        self.gram = [
            [contravariant_pairing(u, w, family) for w in self.basis]
            for u in self.basis
        ]
        if self.basis and linalg.det(self.gram) == 0:
            raise ValueError("weight form degenerates on the singular subspace")
        self._gram_inv = linalg.inv(self.gram) if self.basis else []

    @property
    def dimension(self):
        return len(self.basis)

    def membership_residual(self, u):
        """Max |condition(u)| over all defining conditions (0 iff singular)."""
        index = self.family.flag_index
        worst = 0
        for row in self.conditions:
            total = 0
            for key, val in u.coeffs.items():
                coeff = row[index.position(key)]
                if coeff:
                    total += coeff * val
            worst = max(worst, abs(complex(total)))
        return worst

    def contains(self, u, tol=None):
        if tol is None:
            index = self.family.flag_index
            for row in self.conditions:
                total = Fraction(0)
                for key, val in u.coeffs.items():
                    coeff = row[index.position(key)]
                    if coeff:
                        total += coeff * val
                if total != 0:
                    return False
            return True
        return self.membership_residual(u) <= tol

    def coordinates(self, u):
        """Coefficients of u in the singular basis (u must lie in the span)."""
        pairings = [contravariant_pairing(b, u, self.family) for b in self.basis]
        return [
            sum(row[j] * pairings[j] for j in range(len(pairings)))
            for row in self._gram_inv
        ]

    def from_coordinates(self, values):
        out = FlagVector()
        for val, vec in zip(values, self.basis):
            if val != 0:
                out = out + vec * val
        return out

    def project(self, u):
        """Orthogonal projection of an arbitrary vector onto the subspace."""
        return self.from_coordinates(self.coordinates(u))


def _independent_subsets(family, size):
    import itertools

    if size == 0:
        return [()]
    return [
        s
        for s in itertools.combinations(range(1, family.n + 1), size)
        if linalg.rank([family.b[i - 1] for i in s]) == size
    ]


@lru_cache(maxsize=None)
def singular_subspace(family):
    space = SingularSubspace(family)
    expected = _binomial(family.n - 1, family.k)
    if family.generic and space.dimension != expected:
        raise RuntimeError(
            f"singular subspace has dimension {space.dimension}, expected {expected}"
        )
    return space


def _binomial(n, k):
    from math import comb

    return comb(n, k)


@lru_cache(maxsize=None)
def _v_vector_sorted(family, key):
    asum = family.weight_sum
    k = family.k
    if k == 1:
        (j,) = key
        vec = -FlagVector.basis(key)
        scale = family.a[j - 1] / asum
        for i in range(1, family.n + 1):
            vec.accumulate((i,), scale)
    else:
        vec = FlagVector.basis(key)
        for m in range(k):
            scale = family.a[key[m] - 1] / asum
            for j in range(1, family.n + 1):
                vec.accumulate(key[:m] + (j,) + key[m + 1 :], -scale)
    index = family.flag_index
    vec.coeffs = {s: c for s, c in vec.coeffs.items() if s in index}
    space = singular_subspace(family)
    if not space.contains(vec):
        raise RuntimeError(f"v vector for {key} fails the singularity conditions")
    if k >= 2 and space.project(FlagVector.basis(key)) != vec:
        raise RuntimeError(f"v vector for {key} is not the projection of F_{key}")
    return vec


def v_vector(family, indices):
    """The distinguished singular vector; repeated indices give zero and
    unsorted tuples pick up the permutation sign."""
    key, sign = sort_with_sign(tuple(indices))
    if sign == 0:
        return FlagVector()
    vec = _v_vector_sorted(family, key)
    return vec if sign == 1 else -vec


def gram_v(family, left, right):
    """Closed-form S(v_left, v_right); must match the direct pairing."""
    lkey, lsign = sort_with_sign(tuple(left))
    rkey, rsign = sort_with_sign(tuple(right))
    if lsign == 0 or rsign == 0:
        return Fraction(0)
    asum = family.weight_sum
    if lkey == rkey:
        inside = weight_product(family, lkey)
        outside = sum(
            family.a[j - 1] for j in range(1, family.n + 1) if j not in lkey
        )
        return lsign * rsign * inside * outside / asum
    common = set(lkey) & set(rkey)
    if len(common) < family.k - 1:
        return Fraction(0)
    tail = tuple(sorted(common))
    (x,) = set(lkey) - common
    (y,) = set(rkey) - common
    _, xsign = sort_with_sign(tail + (x,))
    _, ysign = sort_with_sign(tail + (y,))
    value = -weight_product(family, tail) * family.a[x - 1] * family.a[y - 1] / asum
    return lsign * rsign * xsign * ysign * value


def orthogonal_projection(family, u):
    return singular_subspace(family).project(u)
