"""Connection operators on the flag space and flat-section transport.

For each circuit C the operator L_C acts on the standard flag basis, and
the connection operators are K_j(z) = sum_C (lambda_j^C / f_C(z)) L_C.
Flat sections of slope kappa solve kappa dI/dz_j = K_j(z) I; transported
along a path they stay inside the singular subspace and pair invariantly.

Everything fiber-exact here is done in rational arithmetic (operators,
symmetry, curl, commutators on the singular subspace); transport is an
adaptive embedded Runge-Kutta integrator over the circuit data with a
discriminant-distance guard.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import critalg, linalg
from .core import coords, f_c_value
from .linforms import LinExpr, linear_form
from .osflag import (
    FlagVector,
    contravariant_pairing,
    singular_subspace,
    sort_with_sign,
    weight_product,
)


# ---------------------------------------------------------------------------
# circuit operators


@lru_cache(maxsize=None)
def _l_c_columns(family, circuit_indices):
    """Sparse columns of L_C: sorted input subset -> ((output subset, coef)...).

    The operator kills F_T unless T meets the circuit in all but one index;
    output flags over dependent subsets are zero and dropped.
    """
    index = family.flag_index
    cset = set(circuit_indices)
    r = len(circuit_indices)
    columns = {}
    for T in index:
        inter = [x for x in T if x in cset]
        if len(inter) != r - 1:
            continue
        (missing,) = cset.difference(inter)
        m = circuit_indices.index(missing) + 1
        outside = tuple(x for x in T if x not in cset)
        arranged = tuple(x for x in circuit_indices if x != missing) + outside
        _, sigma = sort_with_sign(arranged)
        if sigma == 0:
            continue
        base = sigma if m % 2 == 0 else -sigma
        terms = []
        for l, il in enumerate(circuit_indices, start=1):
            out = tuple(x for x in circuit_indices if x != il) + outside
            key, osign = sort_with_sign(out)
            if osign == 0 or key not in index:
                continue
            sign = base if l % 2 == 0 else -base
            terms.append((key, sign * osign * family.a[il - 1]))
        if terms:
            columns[T] = tuple(terms)
    return columns


def l_c_matrix(family, circuit):
    """Exact matrix of L_C over the standard flag basis."""
    index = family.flag_index
    n = len(index)
    mat = [[Fraction(0)] * n for _ in range(n)]
    for T, terms in _l_c_columns(family, circuit.indices).items():
        q = index.position(T)
        for key, coef in terms:
            mat[index.position(key)][q] += coef
    return mat


def discriminant_min(family, z):
    """min over circuits of |f_C(z)|."""
    return min(abs(complex(f_c_value(c, z))) for c in family.circuit_list)


def k_operator(family, z, j):
    """Exact matrix of K_j(z) assembled from the circuit operators."""
    if not 1 <= j <= family.n:
        raise ValueError(f"index {j} out of range")
    index = family.flag_index
    n = len(index)
    zz = coords(z)
    mat = [[Fraction(0)] * n for _ in range(n)]
    for circuit in family.circuit_list:
        lam_j = circuit.coefficient(j)
        if lam_j == 0:
            continue
        fc = f_c_value(circuit, zz)
        if fc == 0:
            raise ValueError(
                f"fiber lies on the discriminant: f_C vanishes for circuit "
                f"{circuit.indices}"
            )
        scale = lam_j / fc
        for T, terms in _l_c_columns(family, circuit.indices).items():
            q = index.position(T)
            for key, coef in terms:
                mat[index.position(key)][q] += scale * coef
    return mat


def k_operator_minor_form(family, z, j):
    """K_j(z) assembled from (k+1)-index minor data instead of circuits;
    only valid when every k-subset away from j is independent."""
    index = family.flag_index
    n = len(index)
    zz = coords(z)
    mat = [[Fraction(0)] * n for _ in range(n)]
    for tail in itertools.combinations(
        [i for i in range(1, family.n + 1) if i != j], family.k
    ):
        d_tail = family.minor(tail)
        if d_tail == 0:
            continue
        u = tuple(sorted((j,) + tail))
        fu = critalg.f_minor_value(family, zz, (j,) + tail)
        if fu == 0:
            raise ValueError(
                f"fiber lies on the pole locus of the minor form at {(j,) + tail}"
            )
        scale = d_tail / fu
        for T, terms in _l_c_columns(family, u).items():
            q = index.position(T)
            for key, coef in terms:
                mat[index.position(key)][q] += scale * coef
    return mat


def apply_matrix(family, mat, vec):
    """Apply an exact flag-basis matrix to a FlagVector."""
    index = family.flag_index
    cols = vec.to_coordinates(index)
    out = FlagVector()
    for p, subset in enumerate(index):
        total = sum(mat[p][q] * cols[q] for q in range(len(index)) if cols[q])
        if total:
            out.coeffs[subset] = total
    return out


# ---------------------------------------------------------------------------
# structure checks


def symmetry_residual(family, mat):
    """Max |S(M e_p, e_q) - S(e_p, M e_q)| over basis pairs. The weight form
    is diagonal on flags, so this is |w_p M_qp - w_q M_pq|."""
    index = family.flag_index
    weights = [weight_product(family, T) for T in index]
    worst = 0
    for p in range(len(index)):
        for q in range(p + 1, len(index)):
            diff = weights[q] * mat[q][p] - weights[p] * mat[p][q]
            worst = max(worst, abs(diff))
    return worst


def invariance_residual(family, mat):
    """Max violation of the singular conditions on images of the singular
    basis under the matrix."""
    space = singular_subspace(family)
    worst = 0
    for vec in space.basis:
        image = apply_matrix(family, mat, vec)
        worst = max(worst, space.membership_residual(image))
    return worst


def check_symmetry_and_invariance(family, z):
    """Every K_j must be S-symmetric and preserve the singular subspace,
    exactly, at the given fiber."""
    report = {"fiber": [str(v) for v in coords(z)], "operators": []}
    ok = True
    for j in range(1, family.n + 1):
        mat = k_operator(family, z, j)
        sym = symmetry_residual(family, mat)
        inv = invariance_residual(family, mat)
        good = sym == 0 and inv == 0
        ok = ok and good
        report["operators"].append(
            {"index": j, "symmetric": sym == 0, "invariant": inv == 0}
        )
    report["passed"] = ok
    return report


def _k_entry_exprs(family, j):
    """Entries of K_j as exact expressions in z (sum of lambda_j / f_C
    multiples of circuit operator entries)."""
    index = family.flag_index
    n = len(index)
    entries = [[LinExpr.zero() for _ in range(n)] for _ in range(n)]
    for circuit in family.circuit_list:
        lam_j = circuit.coefficient(j)
        if lam_j == 0:
            continue
        lam_form = linear_form(
            [circuit.coefficient(i) for i in range(1, family.n + 1)]
        )
        for T, terms in _l_c_columns(family, circuit.indices).items():
            q = index.position(T)
            for key, coef in terms:
                entries[index.position(key)][q] = entries[index.position(key)][
                    q
                ] + LinExpr.monomial(lam_j * coef, {lam_form: -1})
    return entries


def curl_residual(family, z, pairs=None):
    """Exact residual of d(K_i dz_i + ...) = 0: the z-derivative of every
    entry of K_j in direction i must match the closed form
    -lambda_i lambda_j / f_C^2 summed over circuits, and the (i, j) and
    (j, i) derivative matrices must agree."""
    index = family.flag_index
    zz = coords(z)
    n = len(index)
    if pairs is None:
        pairs = list(itertools.combinations(range(1, family.n + 1), 2))
    exprs = {}
    worst = Fraction(0)
    for i, j in pairs:
        for a, b in ((i, j), (j, i)):
            if b not in exprs:
                exprs[b] = _k_entry_exprs(family, b)
        closed = {}
        for a, b in ((i, j), (j, i)):
            mat = [[Fraction(0)] * n for _ in range(n)]
            for circuit in family.circuit_list:
                lam_a = circuit.coefficient(a)
                lam_b = circuit.coefficient(b)
                if lam_a == 0 or lam_b == 0:
                    continue
                fc = f_c_value(circuit, zz)
                scale = -lam_a * lam_b / (fc * fc)
                for T, terms in _l_c_columns(family, circuit.indices).items():
                    q = index.position(T)
                    for key, coef in terms:
                        mat[index.position(key)][q] += scale * coef
            closed[(a, b)] = mat
            symbolic = exprs[b]
            for p in range(n):
                for q in range(n):
                    val = symbolic[p][q].diff(a).evaluate_exact(zz)
                    worst = max(worst, abs(val - mat[p][q]))
        for p in range(n):
            for q in range(n):
                worst = max(worst, abs(closed[(i, j)][p][q] - closed[(j, i)][p][q]))
    return worst


def commutator_residuals(family, z, pairs=None):
    """Exact [K_i, K_j] residual on the singular subspace plus the measured
    sup-norm of the commutator on the whole flag space."""
    space = singular_subspace(family)
    if pairs is None:
        pairs = list(itertools.combinations(range(1, family.n + 1), 2))
    mats = {}
    exact_worst = Fraction(0)
    full_worst = 0.0
    for i, j in pairs:
        for idx in (i, j):
            if idx not in mats:
                mats[idx] = k_operator(family, z, idx)
        comm = linalg.mat_mul(mats[i], mats[j])
        rev = linalg.mat_mul(mats[j], mats[i])
        n = len(comm)
        diff = [[comm[p][q] - rev[p][q] for q in range(n)] for p in range(n)]
        for vec in space.basis:
            image = apply_matrix(family, diff, vec)
            residual = max((abs(c) for c in image.coeffs.values()), default=0)
            exact_worst = max(exact_worst, residual)
        full_worst = max(
            full_worst,
            max((abs(complex(e)) for row in diff for e in row), default=0.0),
        )
    return exact_worst, full_worst


def check_flatness(family, z, pairs=None):
    """Curl and singular-subspace commutator checks at a fiber; the full
    flag-space commutator norm is reported but not asserted."""
    curl = curl_residual(family, z, pairs)
    on_sing, on_full = commutator_residuals(family, z, pairs)
    return {
        "curl_exact_zero": curl == 0,
        "commutator_singular_exact_zero": on_sing == 0,
        "commutator_full_norm": float(on_full),
        "passed": curl == 0 and on_sing == 0,
    }


def weighted_euler_residual(family, z):
    """Exact residual of (sum_j z_j K_j) v = |a| v on the singular basis."""
    index = family.flag_index
    zz = coords(z)
    n = len(index)
    total = [[Fraction(0)] * n for _ in range(n)]
    for j in range(1, family.n + 1):
        if zz[j - 1] == 0:
            continue
        mat = k_operator(family, zz, j)
        for p in range(n):
            zpj = zz[j - 1]
            row = mat[p]
            trow = total[p]
            for q in range(n):
                if row[q]:
                    trow[q] += zpj * row[q]
    space = singular_subspace(family)
    asum = family.weight_sum
    worst = Fraction(0)
    for vec in space.basis:
        image = apply_matrix(family, total, vec) - vec * asum
        residual = max((abs(c) for c in image.coeffs.values()), default=0)
        worst = max(worst, residual)
    return worst


# ---------------------------------------------------------------------------
# flat-section transport


@lru_cache(maxsize=None)
def _circuit_arrays(family):
    index = family.flag_index
    n = len(index)
    lams = []
    ops = []
    for circuit in family.circuit_list:
        lam = np.zeros(family.n, dtype=complex)
        for pos, i in enumerate(circuit.indices):
            lam[i - 1] = complex(circuit.lam[pos])
        mat = np.zeros((n, n), dtype=complex)
        for T, terms in _l_c_columns(family, circuit.indices).items():
            q = index.position(T)
            for key, coef in terms:
                mat[index.position(key)][q] += complex(coef)
        lams.append(lam)
        ops.append(mat)
    return np.array(lams), np.array(ops)


# Dormand-Prince embedded pair
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (
    5179 / 57600,
    0.0,
    7571 / 16695,
    393 / 640,
    -92097 / 339200,
    187 / 2100,
    1 / 40,
)


@dataclass
class FlowResult:
    section: FlagVector
    extras: tuple
    steps: int
    rejected: int
    trajectory: list


def flow_flat_section(
    family,
    path,
    kappa,
    start,
    *,
    rtol=1e-10,
    atol=1e-12,
    guard=1e-6,
    extras=None,
    record=False,
    max_steps=200_000,
):
    """Transport a section along a piecewise-linear path in fiber space,
    solving kappa dI = (sum_j K_j dz_j) I with adaptive step control.

    extras: optional callables g(s, z, zdot, I) -> complex appended to the
    state as path quadratures. The integrator aborts if the path comes
    within `guard` of the discriminant or the step size underflows.
    """
    kappa = complex(kappa)
    if kappa == 0:
        raise ValueError("slope kappa must be nonzero")
    waypoints = [np.array([complex(v) for v in coords(p)]) for p in path]
    if len(waypoints) < 2:
        raise ValueError("path needs at least two fiber points")
    index = family.flag_index
    dim = len(index)
    lams, ops = _circuit_arrays(family)
    extras = tuple(extras or ())
    if isinstance(start, FlagVector):
        y_flag = np.array(
            [complex(c) for c in start.to_coordinates(index)], dtype=complex
        )
    else:
        y_flag = np.array([complex(c) for c in start], dtype=complex)
        if y_flag.shape != (dim,):
            raise ValueError("start vector has the wrong dimension")
    y = np.concatenate([y_flag, np.zeros(len(extras), dtype=complex)])
    nseg = len(waypoints) - 1
    trajectory = []
    steps = rejected = 0

    def derivative(z, zdot, s, state):
        fvals = lams @ z
        small = np.min(np.abs(fvals))
        if small < guard:
            raise RuntimeError(
                f"path within {guard} of the discriminant at s={s:.6f}, "
                f"z={[complex(v) for v in z]}"
            )
        coefs = (lams @ zdot) / fvals
        mat = np.tensordot(coefs, ops, axes=1)
        flag = state[:dim]
        out = np.empty_like(state)
        out[:dim] = mat @ flag / kappa
        for e, fn in enumerate(extras):
            out[dim + e] = fn(s, z, zdot, flag)
        return out

    if record:
        trajectory.append(_trajectory_row(0.0, waypoints[0], y[:dim]))
    for seg in range(nseg):
        z0, z1 = waypoints[seg], waypoints[seg + 1]
        zdot = (z1 - z0) * nseg  # d z / d s with s spanning 1/nseg per segment
        s0, s1 = seg / nseg, (seg + 1) / nseg
        seg_len = s1 - s0
        s = s0
        h = seg_len / 32
        while s < s1 - 1e-15:
            h = min(h, s1 - s)
            if h < seg_len * 1e-13:
                zc = z0 + (s - s0) * nseg * (z1 - z0)
                raise RuntimeError(
                    f"step size underflow at s={s:.8f}, z={[complex(v) for v in zc]}"
                )
            if steps + rejected > max_steps:
                raise RuntimeError("transport exceeded the step budget")
            ks = []
            for stage in range(7):
                ss = s + _DP_C[stage] * h
                ys = y.copy()
                for w, kv in zip(_DP_A[stage], ks):
                    ys += h * w * kv
                zc = z0 + (ss - s0) * nseg * (z1 - z0)
                ks.append(derivative(zc, zdot, ss, ys))
            y5 = y.copy()
            y4 = y.copy()
            for w5, w4, kv in zip(_DP_B5, _DP_B4, ks):
                if w5:
                    y5 += h * w5 * kv
                if w4:
                    y4 += h * w4 * kv
            scale = atol + rtol * max(np.max(np.abs(y)), np.max(np.abs(y5)))
            err = np.max(np.abs(y5 - y4)) / scale
            if err <= 1.0:
                s += h
                y = y5
                steps += 1
                if record:
                    zc = z0 + (s - s0) * nseg * (z1 - z0)
                    trajectory.append(_trajectory_row(s, zc, y[:dim]))
            else:
                rejected += 1
            factor = 0.9 * (1.0 / err) ** 0.2 if err > 0 else 5.0
            h *= min(5.0, max(0.2, factor))
    section = FlagVector.from_coordinates(index.subsets, list(y[:dim]))
    section.coeffs = {k: v for k, v in section.coeffs.items() if v != 0}
    return FlowResult(
        section=section,
        extras=tuple(y[dim:]),
        steps=steps,
        rejected=rejected,
        trajectory=trajectory,
    )


def _trajectory_row(s, z, flag):
    return {
        "s": float(s),
        "z": [[float(v.real), float(v.imag)] for v in z],
        "I": [[float(v.real), float(v.imag)] for v in flag],
    }


def pairing_functional(family, vec):
    """Constant data for fast S(vec, .) evaluation along a flow: weights of
    the diagonal form folded into the fixed argument's coordinates."""
    index = family.flag_index
    return np.array(
        [
            complex(vec.get(T)) * complex(weight_product(family, T))
            for T in index
        ],
        dtype=complex,
    )


# ---------------------------------------------------------------------------
# conformal block section and derivative sections


def check_conformal_block(family, z, anchor=None):
    """Exact check of (|a|/k) d_j q = K_j q at a fiber, with the section's
    coordinates differentiated symbolically."""
    from .frobenius import conformal_block_exprs

    index = family.flag_index
    zz = coords(z)
    exprs = conformal_block_exprs(family, anchor)
    values = [expr.evaluate_exact(zz) for expr in exprs]
    scale = Fraction(family.weight_sum, family.k)
    for j in range(1, family.n + 1):
        mat = k_operator(family, zz, j)
        lhs = [scale * expr.diff(j).evaluate_exact(zz) for expr in exprs]
        rhs = [
            sum(mat[p][q] * values[q] for q in range(len(index)) if values[q])
            for p in range(len(index))
        ]
        if any(l != r for l, r in zip(lhs, rhs)):
            return False
    return True


def derivative_sections(family, z, directions, anchor=None):
    """The iterated derivative of the conformal block section in the given
    directions, computed two ways: symbolically, and through the algebra as
    (k (k-1) ... (k-r+1) / |a|^r) alpha(product of generators).

    Returns the pair (symbolic, algebraic) of flag vectors; they must agree
    exactly. Orders r > k give the zero section.
    """
    from .frobenius import alpha_structural, conformal_block_exprs

    index = family.flag_index
    zz = coords(z)
    r = len(directions)
    exprs = conformal_block_exprs(family, anchor)
    symbolic = FlagVector()
    for pos, expr in enumerate(exprs):
        val = expr.diff_path(directions).evaluate_exact(zz)
        if val != 0:
            symbolic.coeffs[index.subset(pos)] = val
    falling = Fraction(1)
    for i in range(r):
        falling *= family.k - i
    if falling == 0:
        algebraic = FlagVector()
    else:
        wvec = critalg.monomial_to_w(family, zz, tuple(directions), anchor)
        algebraic = alpha_structural(family, wvec) * (
            falling / family.weight_sum**r
        )
    return symbolic, algebraic
