"""Families of parallelly translated weighted hyperplanes.

A family is the data (k, n, b, a): for each j = 1..n a nonzero linear form
g_j(t) = sum_m b_j^m t_m on C^k and a nonzero rational weight a_j, with
sum(a) != 0. A base point z in C^n selects the arrangement of hyperplanes
{f_j = 0}, f_j(t) = z_j + g_j(t).

This module owns the matroid layer: independent k-subsets, circuits with
their normalized linear relations, and the discriminant test that decides
whether a fiber z has normal crossings (all circuit forms f_C(z) nonzero).

Hyperplane indices are 1-based everywhere in the public interface; index
tuples are sorted unless an operation explicitly permits reordering.
"""

from __future__ import annotations

import itertools
import json
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from . import linalg


class ConfigError(ValueError):
    """Invalid family description (bad shape, zero weight, malformed rational...)."""


_RATIONAL_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


def parse_rational(value):
    """Parse "p" or "p/q" (q > 0) into a Fraction; plain ints pass through."""
    if isinstance(value, bool):
        raise ConfigError(f"malformed rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if _RATIONAL_RE.match(text):
            return Fraction(text)
    raise ConfigError(f"malformed rational: {value!r}")


def format_rational(value):
    f = Fraction(value)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


@dataclass(frozen=True)
class ArrangementFamily:
    k: int
    n: int
    b: tuple  # n rows, each a k-tuple of Fraction
    a: tuple  # n weights, Fraction

    def __post_init__(self):
        if not (isinstance(self.k, int) and isinstance(self.n, int)):
            raise ConfigError("k and n must be integers")
        if self.k < 1 or self.n <= self.k:
            raise ConfigError(f"need n > k >= 1, got k={self.k}, n={self.n}")
        if len(self.b) != self.n or any(len(row) != self.k for row in self.b):
            raise ConfigError("b must be an n x k matrix")
        for j, row in enumerate(self.b, start=1):
            if all(x == 0 for x in row):
                raise ConfigError(f"coefficient row {j} is zero")
        if len(self.a) != self.n:
            raise ConfigError("weight vector must have length n")
        for j, w in enumerate(self.a, start=1):
            if w == 0:
                raise ConfigError(f"weight a_{j} is zero")
        if sum(self.a) == 0:
            raise ConfigError("weights sum to zero")

    @property
    def weight_sum(self):
        return sum(self.a)

    @cached_property
    def _minor_cache(self):
        return {}

    def minor(self, indices):
        """det of the k x k submatrix of b picked by the given distinct rows,
        in the given order (swapping two indices flips the sign)."""
        key = tuple(indices)
        if len(key) != self.k or len(set(key)) != self.k:
            raise ValueError(f"need {self.k} distinct indices, got {key}")
        cache = self._minor_cache
        if key not in cache:
            cache[key] = linalg.det([list(self.b[i - 1]) for i in key])
        return cache[key]

    @cached_property
    def generic(self):
        """True when every k x k minor of b is nonzero."""
        return all(
            self.minor(sub) != 0
            for sub in itertools.combinations(range(1, self.n + 1), self.k)
        )

    @cached_property
    def circuit_list(self):
        return tuple(_find_circuits(self))

    @cached_property
    def flag_index(self):
        return SubsetIndex(self)


@dataclass(frozen=True)
class BasePoint:
    z: tuple

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(self.z))

    def __len__(self):
        return len(self.z)

    def __iter__(self):
        return iter(self.z)

    def __getitem__(self, i):
        return self.z[i]


def coords(z):
    """Accept a BasePoint or any coordinate sequence, return a plain tuple."""
    if isinstance(z, BasePoint):
        return z.z
    return tuple(z)


@dataclass(frozen=True)
class Circuit:
    indices: tuple  # sorted 1-based index tuple
    lam: tuple  # relation coefficients, normalized so lam[0] == 1

    def __post_init__(self):
        if list(self.indices) != sorted(self.indices):
            raise ValueError("circuit indices must be sorted")
        if self.lam[0] != 1:
            raise ValueError("relation must be normalized at the smallest index")

    def coefficient(self, j):
        """lambda_j for j in the circuit, 0 otherwise."""
        try:
            return self.lam[self.indices.index(j)]
        except ValueError:
            return Fraction(0)


class SubsetIndex:
    """Catalogue of the independent k-subsets of {1..n}, lexicographically
    ordered, with positional lookup both ways. This fixes the standard basis
    order of the flag space once and for all."""

    def __init__(self, family):
        k = family.k
        subs = [
            s
            for s in itertools.combinations(range(1, family.n + 1), k)
            if linalg.rank([family.b[i - 1] for i in s]) == k
        ]
        self.subsets = tuple(subs)
        self._pos = {s: i for i, s in enumerate(subs)}

    def __len__(self):
        return len(self.subsets)

    def __iter__(self):
        return iter(self.subsets)

    def __contains__(self, subset):
        return tuple(subset) in self._pos

    def position(self, subset):
        return self._pos[tuple(subset)]

    def subset(self, position):
        return self.subsets[position]


def load_family(config):
    """Build a validated family from a config document.

    Accepts a dict, a JSON string, or a path to a JSON file with keys
    "k", "n", "b" (n rows of k rationals), "weights" (n rationals) and
    optional "z" (n rationals, a preferred base point). Rationals are
    integers or "p/q" strings with positive q.
    """
    doc = _load_document(config)
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    missing = [key for key in ("k", "n", "b", "weights") if key not in doc]
    if missing:
        raise ConfigError(f"config missing keys: {', '.join(missing)}")
    k, n = doc["k"], doc["n"]
    if not isinstance(k, int) or not isinstance(n, int):
        raise ConfigError("k and n must be integers")
    raw_b = doc["b"]
    if not isinstance(raw_b, list) or any(not isinstance(r, list) for r in raw_b):
        raise ConfigError("b must be a list of rows")
    b = tuple(tuple(parse_rational(x) for x in row) for row in raw_b)
    raw_a = doc["weights"]
    if not isinstance(raw_a, list):
        raise ConfigError("weights must be a list")
    a = tuple(parse_rational(x) for x in raw_a)
    family = ArrangementFamily(k=k, n=n, b=b, a=a)
    check_unbalanced(family)
    if "z" in doc:
        z = tuple(parse_rational(x) for x in doc["z"])
        if len(z) != n:
            raise ConfigError("z must have length n")
        object.__setattr__(family, "preferred_z", BasePoint(z))
    return family


def check_unbalanced(family):
    """Weight checks beyond a_j != 0 and |a| != 0: every circuit's weight sum
    must be nonzero too. Sufficient for generic families; degenerate families
    can hide further resonances that this does not see."""
    for circuit in family.circuit_list:
        if sum(family.a[i - 1] for i in circuit.indices) == 0:
            raise ConfigError(
                f"weights of circuit {circuit.indices} sum to zero"
            )


def _load_document(config):
    if isinstance(config, dict):
        return config
    if isinstance(config, (str, bytes)):
        text = config
        if isinstance(config, str) and not config.lstrip().startswith("{"):
            try:
                with open(config, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}") from exc
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    if hasattr(config, "read"):
        try:
            return json.load(config)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    raise ConfigError(f"unsupported config source: {type(config).__name__}")


def _find_circuits(family):
    """Minimal dependent subsets, sizes 2..k+1, with normalized relations."""
    found = []
    dependents = []
    for size in range(2, family.k + 2):
        for sub in itertools.combinations(range(1, family.n + 1), size):
            members = set(sub)
            if any(c <= members for c in dependents):
                continue
            rows = [family.b[i - 1] for i in sub]
            if linalg.rank(rows) == size:
                continue
            dependents.append(frozenset(sub))
            found.append(_circuit_from(family, sub))
    return found


def _circuit_from(family, sub):
    # relation space of a circuit is one-dimensional; columns = members of sub
    mat = [[family.b[i - 1][m] for i in sub] for m in range(family.k)]
    basis = linalg.nullspace(mat, len(sub))
    if len(basis) != 1:
        raise RuntimeError(f"subset {sub} is not a minimal dependence")
    lam = basis[0]
    lead = lam[0]
    if lead == 0:
        raise RuntimeError(f"subset {sub} is not a minimal dependence")
    return Circuit(indices=tuple(sub), lam=tuple(x / lead for x in lam))


def circuits(family):
    return family.circuit_list


def f_c_value(circuit, z):
    """The circuit form f_C(z) = sum_{i in C} lambda_i z_i."""
    zc = coords(z)
    return sum(lam * zc[i - 1] for lam, i in zip(circuit.lam, circuit.indices))


def is_good_fiber(family, z):
    """True iff z avoids the discriminant: every circuit form is nonzero,
    equivalently the fiber arrangement has normal crossings."""
    zc = coords(z)
    return all(f_c_value(c, zc) != 0 for c in family.circuit_list)


def sample_good_point(family, seed, budget=1000):
    """Rejection-sample a rational base point off the discriminant.

    Deterministic for a fixed seed. Numerators lie in [-12, 12] and
    denominators in [1, 6]; the discriminant has measure zero, so for a
    reasonable family this ends quickly. A budget exhaustion signals a
    degenerate family and raises.
    """
    rng = random.Random(seed)
    for _ in range(budget):
        z = tuple(
            Fraction(rng.randint(-12, 12), rng.randint(1, 6)) for _ in range(family.n)
        )
        if is_good_fiber(family, z):
            return BasePoint(z)
    raise RuntimeError(f"no good base point found within {budget} draws")


def minor_det(family, indices):
    return family.minor(tuple(indices))
