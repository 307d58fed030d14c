"""Command-line front end: config ingestion, suite orchestration,
deterministic sampling, JSON report emission.

Verbs: check, circuits, basis, critical, potential, gm-flow. Exit codes:
0 all checks pass, 1 at least one identity failed (witnesses in the
report), 2 configuration problem. Identical (config, seed) pairs produce
byte-identical reports; numeric fields are rounded to 12 significant
digits before serialization. The ARRFROB_THREADS environment variable
caps suite-level parallelism.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import critalg, frobenius, gaussmanin, linalg
from .core import (
    ConfigError,
    check_unbalanced,
    circuits,
    coords,
    format_rational,
    is_good_fiber,
    load_family,
    parse_rational,
    sample_good_point,
)
from .osflag import (
    CoVector,
    FlagVector,
    contravariant_pairing,
    max_abs_diff,
    singular_subspace,
    v_vector,
    weight_product,
)

SUITES = (
    "circuits",
    "basis",
    "flatness",
    "symmetry",
    "critical",
    "canonical",
    "conformal",
    "potential",
    "periods",
    "strata",
)


def report_schema_version():
    return "arrfrob-report/1"


# ---------------------------------------------------------------------------
# serialization helpers


def _fixed(x):
    """Round a float to 12 significant digits for reproducible reports."""
    if x == 0:
        return 0.0
    return float(f"{float(x):.12e}")


def _num(value):
    """Serialize a scalar: rationals as exact strings, floats rounded,
    complex as a fixed [re, im] pair."""
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return format_rational(Fraction(value))
    if isinstance(value, complex):
        return [_fixed(value.real), _fixed(value.imag)]
    if isinstance(value, float):
        return _fixed(value)
    return value


def _vector(values):
    return [_num(v) for v in values]


# ---------------------------------------------------------------------------
# config handling


def _load_config(path):
    if path is None:
        raise ConfigError("--config is required for this command")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return raw


def _parse_suites(text):
    names = [s.strip() for s in text.split(",") if s.strip()]
    if not names:
        raise ConfigError("empty suite list")
    for name in names:
        if name not in SUITES:
            raise ConfigError(f"unknown suite: {name}")
    return names


class RunSettings:
    def __init__(self, raw, args):
        self.raw = raw
        self.seed = args.seed if args.seed is not None else int(raw.get("seed", 0))
        self.tol = args.tol if args.tol is not None else float(raw.get("tol", 1e-8))
        self.samples = int(raw.get("samples", 5))
        anchor = args.anchor if args.anchor is not None else raw.get("anchor")
        self.anchor = int(anchor) if anchor is not None else None
        if args.suites is not None:
            self.suites = _parse_suites(args.suites)
        elif "suites" in raw:
            self.suites = list(raw["suites"])
            for name in self.suites:
                if name not in SUITES:
                    raise ConfigError(f"unknown suite: {name}")
        else:
            self.suites = list(SUITES)


def _sample_fibers(family, seed, count):
    return [sample_good_point(family, seed=seed + 101 * i).z for i in range(count)]


# ---------------------------------------------------------------------------
# rows


def _row(rows, ident, ok, residual=None, tol=None, witness=None, skip=False):
    entry = {"id": ident, "status": "skip" if skip else ("pass" if ok else "fail")}
    if residual is not None:
        entry["residual"] = _num(residual)
    if tol is not None:
        entry["tolerance"] = _fixed(tol)
    if witness is not None and not ok and not skip:
        entry["witness"] = witness
    rows.append(entry)
    return entry


# ---------------------------------------------------------------------------
# suites


def _suite_circuits(family, cfg):
    rows = []
    listing = []
    for c in circuits(family):
        wsum = sum(family.a[j - 1] for j in c.indices)
        listing.append(
            {
                "indices": list(c.indices),
                "lambda": [_num(l) for l in c.lam],
                "weight_sum": _num(wsum),
            }
        )
        # relation: sum_j lam_j * b_j = 0, componentwise
        residual = [
            sum(c.lam[pos] * family.b[j - 1][m] for pos, j in enumerate(c.indices))
            for m in range(family.k)
        ]
        _row(
            rows,
            f"circuit-relation-{'-'.join(map(str, c.indices))}",
            all(v == 0 for v in residual),
            witness={"residual": _vector(residual)},
        )
        _row(rows, f"circuit-normalized-{'-'.join(map(str, c.indices))}", c.lam[0] == 1)
    try:
        check_unbalanced(family)
        _row(rows, "circuits-unbalanced", True)
    except ConfigError as exc:
        _row(rows, "circuits-unbalanced", False, witness={"error": str(exc)})
    return rows, {"circuits": listing}


def _suite_basis(family, cfg):
    rows = []
    import math

    index = family.flag_index
    expected_flag = sum(
        1
        for T in itertools.combinations(range(1, family.n + 1), family.k)
        if family.minor(T) != 0
    )
    _row(rows, "flag-basis-size", len(index) == expected_flag)
    space = singular_subspace(family)
    _row(
        rows,
        "singular-dimension",
        space.dimension == math.comb(family.n - 1, family.k),
        witness={"dimension": space.dimension},
    )
    anchor = cfg.anchor or critalg.default_anchor(family)
    anchored = critalg.anchored_subsets(family, anchor)
    _row(rows, "anchored-basis-size", len(anchored) == math.comb(family.n - 1, family.k))
    gram = [
        [contravariant_pairing(u, w, family) for w in space.basis] for u in space.basis
    ]
    gdet = linalg.det(gram)
    _row(rows, "v-gram-nondegenerate", gdet != 0, witness={"det": _num(gdet)})
    if family.k == 1:
        vs = [v_vector(family, (j,)) for j in range(1, family.n)]
        gram_v = [[contravariant_pairing(u, w, family) for w in vs] for u in vs]
        closed = weight_product(family, range(1, family.n + 1)) / family.weight_sum
        _row(
            rows,
            "v-gram-determinant-closed-form",
            linalg.det(gram_v) == closed,
            witness={"det": _num(linalg.det(gram_v)), "expected": _num(closed)},
        )
    extra = {
        "flag_dimension": len(index),
        "singular_dimension": space.dimension,
        "anchor": anchor,
    }
    if family.k <= 2:
        z = sample_good_point(family, seed=cfg.seed).z
        points = critalg.solve_critical(family, z)
        cond = critalg.evaluation_matrix(family, points, anchor)[1]
        _row(rows, "evaluation-matrix-finite-condition", bool(cond < 1e12), residual=cond)
        extra["evaluation_condition"] = _fixed(cond)
    return rows, extra


def _suite_flatness(family, cfg):
    rows = []
    for i, z in enumerate(_sample_fibers(family, cfg.seed, cfg.samples)):
        rep = gaussmanin.check_flatness(family, z)
        _row(
            rows,
            f"curl-exact-sample-{i}",
            rep["curl_exact_zero"],
            witness={"z": _vector(z)},
        )
        _row(
            rows,
            f"commutator-singular-sample-{i}",
            rep["commutator_singular_exact_zero"],
            residual=rep["commutator_full_norm"],
            witness={"z": _vector(z)},
        )
    return rows, {}


def _suite_symmetry(family, cfg):
    rows = []
    for i, z in enumerate(_sample_fibers(family, cfg.seed, cfg.samples)):
        rep = gaussmanin.check_symmetry_and_invariance(family, z)
        ok_sym = all(op["symmetric"] for op in rep["operators"])
        ok_inv = all(op["invariant"] for op in rep["operators"])
        _row(rows, f"operator-symmetry-sample-{i}", ok_sym, witness={"z": _vector(z)})
        _row(rows, f"subspace-invariance-sample-{i}", ok_inv, witness={"z": _vector(z)})
        wer = gaussmanin.weighted_euler_residual(family, z)
        _row(rows, f"weighted-euler-sample-{i}", wer == 0, residual=wer)
    return rows, {}


def _suite_critical(family, cfg):
    rows = []
    if family.k > 2:
        _row(rows, "critical-solving", True, skip=True)
        return rows, {"note": "numeric critical solving covers k <= 2"}
    expected = critalg.expected_critical_count(family)
    for i, z in enumerate(_sample_fibers(family, cfg.seed, cfg.samples)):
        points = critalg.solve_critical(family, z)
        _row(
            rows,
            f"critical-count-sample-{i}",
            len(points) == expected,
            witness={"found": len(points), "expected": expected},
        )
        minh = min(abs(p.hessian) for p in points)
        _row(rows, f"hessian-nonzero-sample-{i}", minh > 1e-10, residual=minh)
        er = critalg.euler_residual(family, z, points)
        _row(rows, f"euler-identity-sample-{i}", er <= cfg.tol, residual=er, tol=cfg.tol)
        worst = 0.0
        for tail in itertools.combinations(range(1, family.n + 1), family.k - 1):
            for p in points:
                val = 0j
                for j in range(1, family.n + 1):
                    if j in tail:
                        continue
                    minor = family.minor((j,) + tail)
                    if minor == 0:
                        continue
                    val += complex(minor * family.a[j - 1]) / p.f_values[j - 1]
                worst = max(worst, abs(val))
        _row(rows, f"contraction-relations-sample-{i}", worst <= 1e-9, residual=worst, tol=1e-9)
    return rows, {"expected_count": expected}


def _suite_canonical(family, cfg):
    rows = []
    anchor = cfg.anchor
    for i, z in enumerate(_sample_fibers(family, cfg.seed, cfg.samples)):
        comp = frobenius.contravariant_compositions(family, z, analytic=False)
        _row(rows, f"compositions-exact-sample-{i}", comp["exact"])
        if family.k > 2:
            continue
        rep = frobenius.naive_iso_and_constant(family, z, anchor)
        _row(
            rows,
            f"constant-is-one-sample-{i}",
            abs(rep["constant"] - 1) <= 1e-7,
            residual=abs(rep["constant"] - 1),
            tol=1e-7,
        )
        _row(
            rows,
            f"identification-residual-sample-{i}",
            rep["residual"] <= cfg.tol,
            residual=rep["residual"],
            tol=cfg.tol,
        )
        points = critalg.solve_critical(family, z)
        basis = critalg.anchored_subsets(family, anchor or critalg.default_anchor(family))
        worst = 0.0
        for T in basis:
            for U in basis:
                analytic = critalg.residue_pairing_analytic(
                    family, z, CoVector.basis(T), CoVector.basis(U), points
                )
                exact = critalg.structural_pairing(
                    family, CoVector.basis(T), CoVector.basis(U)
                )
                worst = max(worst, abs(analytic - complex(exact)))
        _row(rows, f"isometry-sample-{i}", worst <= cfg.tol, residual=worst, tol=cfg.tol)
    return rows, {}


def _suite_conformal(family, cfg):
    rows = []
    for i, z in enumerate(_sample_fibers(family, cfg.seed, cfg.samples)):
        ok = gaussmanin.check_conformal_block(family, z, cfg.anchor)
        _row(rows, f"block-equations-sample-{i}", ok, witness={"z": _vector(z)})
        q = frobenius.period_map(family, z, cfg.anchor)
        scaled = frobenius.period_map(
            family, tuple(2 * v for v in z), cfg.anchor
        )
        _row(rows, f"block-homogeneity-sample-{i}", scaled == q * Fraction(2**family.k))
        rng = random.Random(cfg.seed + i)
        for r in range(1, family.k + 1):
            dirs = tuple(rng.randint(1, family.n) for _ in range(r))
            sym, alg = gaussmanin.derivative_sections(family, z, dirs, cfg.anchor)
            _row(rows, f"derivative-section-r{r}-sample-{i}", sym == alg)
        over = tuple(1 for _ in range(family.k + 1))
        sym, alg = gaussmanin.derivative_sections(family, z, over, cfg.anchor)
        _row(rows, f"derivative-section-degree-bound-sample-{i}", sym.is_zero() and alg.is_zero())
    return rows, {}


def _suite_potential(family, cfg):
    rows = []
    for i, z in enumerate(_sample_fibers(family, cfg.seed, cfg.samples)):
        if family.k == 1:
            closed = frobenius.potential_first_closed_k1(family, z) if all(
                row[0] == 1 for row in family.b
            ) else None
        elif family.k == 2:
            closed = frobenius.potential_first_closed_k2(family, z)
        else:
            closed = None
        if closed is not None:
            _row(
                rows,
                f"quadratic-potential-closed-form-sample-{i}",
                frobenius.potential_first(family, z, cfg.anchor) == closed,
            )
        P = frobenius.potential_first(family, z, cfg.anchor)
        scaled = frobenius.potential_first(
            family, tuple(3 * v for v in z), cfg.anchor
        )
        _row(rows, f"quadratic-potential-homogeneity-sample-{i}", scaled == Fraction(3) ** (2 * family.k) * P)
        rng = random.Random(cfg.seed + 7 * i)
        tuples = [
            tuple(rng.randint(1, family.n) for _ in range(2 * family.k + 1))
            for _ in range(cfg.samples)
        ]
        worst_row = None
        ok = True
        for tup in tuples:
            row = frobenius.potential_derivative_row(family, z, tup, cfg.anchor)
            if row["abs_err"] != 0.0:
                ok = False
                worst_row = row
        _row(rows, f"log-potential-derivatives-sample-{i}", ok, witness=worst_row)
        ok = True
        for r in range(1, 2 * family.k + 1):
            tup = tuple(rng.randint(1, family.n) for _ in range(r))
            row = frobenius.multi_derivative_identity_row(family, z, tup, cfg.anchor)
            if row["abs_err"] != 0.0:
                ok = False
        _row(rows, f"potential-derivative-ladder-sample-{i}", ok)
    import math

    _row(rows, "structure-constant-2-3", frobenius.a_constant(2, 3) == 24)
    _row(
        rows,
        "structure-constant-top",
        all(frobenius.a_constant(k, 2 * k) == math.factorial(2 * k) for k in range(1, 6)),
    )
    return rows, {}


def _default_kappa(family):
    kappa = Fraction(17)
    special = Fraction(family.weight_sum, family.k)
    while kappa in (special, -special):
        kappa += 1
    return kappa


def _lift_pattern(family):
    """An integer direction w with f_C(w) != 0 for every circuit. Shifting a
    real path by i*w bounds every |f_C| below by |f_C(w)| > 0, so lifted
    segments cannot touch the discriminant."""
    for m in range(1, family.n + 1):
        w = tuple(Fraction(j**m) for j in range(1, family.n + 1))
        vals = [
            abs(sum(lam * w[i - 1] for lam, i in zip(c.lam, c.indices)))
            for c in circuits(family)
        ]
        if all(v != 0 for v in vals):
            return w
    raise ConfigError("no imaginary lift direction found for this family")


def _usable_path(family, seed, waypoints=3):
    """A piecewise-linear path between real good fibers that detours through
    an imaginary lift, keeping a provable distance from the discriminant."""
    pts = _sample_fibers(family, seed, waypoints)
    lift = [complex(0, 1) * float(x) for x in _lift_pattern(family)]
    path = [pts[0]]
    for p in pts:
        path.append(tuple(complex(v) + l for v, l in zip(p, lift)))
    path.append(pts[-1])
    return path


def _suite_periods(family, cfg):
    rows = []
    raw_path = cfg.raw.get("path")
    if raw_path is not None:
        path = [tuple(parse_rational(v) for v in p) for p in raw_path]
    else:
        path = _usable_path(family, cfg.seed + 13)
    kappa = (
        parse_rational(cfg.raw["kappa"]) if "kappa" in cfg.raw else _default_kappa(family)
    )
    space = singular_subspace(family)
    try:
        rep = frobenius.flat_period_check(family, path, tol=max(cfg.tol, 1e-6))
        _row(
            rows,
            "flat-period-increment",
            rep["passed"],
            residual=rep["abs_err"],
            tol=max(cfg.tol, 1e-6),
        )
        start_minus = space.basis[min(1, space.dimension - 1)]
        rep = frobenius.twisted_pairing_invariance(
            family, path, kappa, space.basis[0], start_minus, tol=1e-6
        )
        _row(rows, "opposite-slope-pairing-constant", rep["passed"], residual=rep["drift"], tol=1e-6)
        rep = frobenius.twisted_period_relation(family, path, kappa, space.basis[0], tol=1e-5)
        _row(rows, "twisted-period-relation", rep["passed"], residual=rep["abs_err"], tol=1e-5)
        if family.k == 1:
            rep = frobenius.twisted_closedness_k1(family, path[0], kappa, tol=1e-5)
            _row(rows, "twisted-period-closedness", rep["passed"], residual=rep["curl"], tol=1e-5)
    except RuntimeError as exc:
        _row(rows, "period-path", True, skip=True)
        return rows, {"note": f"path unusable: {exc}"}
    return rows, {"kappa": _num(kappa)}


def _suite_strata(family, cfg):
    rows = []
    if family.k != 1:
        _row(rows, "strata-restriction", True, skip=True)
        return rows, {"note": "strata restriction covers k = 1"}
    raw = cfg.raw.get("partitions")
    if raw is not None:
        partitions = [tuple(tuple(b) for b in part) for part in raw]
    else:
        partitions = [((1, 2),) + tuple((j,) for j in range(3, family.n + 1))]
        if family.n >= 4:
            partitions.append(
                ((1, 2), (3, 4)) + tuple((j,) for j in range(5, family.n + 1))
            )
    for p_index, partition in enumerate(partitions):
        try:
            quotient, _ = frobenius.quotient_family_k1(family, partition)
        except ValueError as exc:
            _row(rows, f"strata-partition-{p_index}", True, skip=True)
            continue
        for i in range(min(cfg.samples, 3)):
            x = sample_good_point(quotient, seed=cfg.seed + 23 * i).z
            rep = frobenius.strata_restriction_k1(family, partition, x)
            _row(
                rows,
                f"strata-partition-{p_index}-sample-{i}",
                rep["passed"],
                residual=rep["log_potential_limit_residual"],
                tol=1e-6,
                witness={k: v for k, v in rep.items() if not k.startswith("log")},
            )
    return rows, {}


_SUITE_RUNNERS = {
    "circuits": _suite_circuits,
    "basis": _suite_basis,
    "flatness": _suite_flatness,
    "symmetry": _suite_symmetry,
    "critical": _suite_critical,
    "canonical": _suite_canonical,
    "conformal": _suite_conformal,
    "potential": _suite_potential,
    "periods": _suite_periods,
    "strata": _suite_strata,
}


# ---------------------------------------------------------------------------
# verbs


def _emit(report, args):
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _family_from_args(args):
    raw = _load_config(args.config)
    family = load_family(raw)
    return raw, family, getattr(family, "preferred_z", None)


def _cmd_check(args):
    raw, family, _ = _family_from_args(args)
    cfg = RunSettings(raw, args)
    threads = max(1, int(os.environ.get("ARRFROB_THREADS", "1")))
    results = {}
    if threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(cfg.suites))) as pool:
            futures = {
                name: pool.submit(_SUITE_RUNNERS[name], family, cfg)
                for name in cfg.suites
            }
            for name in cfg.suites:
                results[name] = futures[name].result()
    else:
        for name in cfg.suites:
            results[name] = _SUITE_RUNNERS[name](family, cfg)
    suites_report = {}
    passed = True
    for name in cfg.suites:
        rows, extra = results[name]
        ok = all(r["status"] != "fail" for r in rows)
        passed = passed and ok
        suites_report[name] = {"passed": ok, "checks": rows, **extra}
    report = {
        "schema": report_schema_version(),
        "family": {
            "k": family.k,
            "n": family.n,
            "b": [[_num(v) for v in row] for row in family.b],
            "weights": _vector(family.a),
        },
        "seed": cfg.seed,
        "tolerance": _fixed(cfg.tol),
        "suites": suites_report,
        "passed": passed,
    }
    _emit(report, args)
    return 0 if passed else 1


def _cmd_circuits(args):
    raw, family, _ = _family_from_args(args)
    cfg = RunSettings(raw, args)
    rows, extra = _suite_circuits(family, cfg)
    passed = all(r["status"] != "fail" for r in rows)
    report = {
        "schema": report_schema_version(),
        "checks": rows,
        "passed": passed,
        **extra,
    }
    _emit(report, args)
    return 0 if passed else 1


def _cmd_basis(args):
    raw, family, _ = _family_from_args(args)
    cfg = RunSettings(raw, args)
    rows, extra = _suite_basis(family, cfg)
    passed = all(r["status"] != "fail" for r in rows)
    report = {
        "schema": report_schema_version(),
        "checks": rows,
        "passed": passed,
        **extra,
    }
    _emit(report, args)
    return 0 if passed else 1


def _cmd_critical(args):
    raw, family, z = _family_from_args(args)
    cfg = RunSettings(raw, args)
    if z is None:
        z = sample_good_point(family, seed=cfg.seed).z
    else:
        z = z.z
    points = critalg.solve_critical(family, z)
    report = {
        "schema": report_schema_version(),
        "z": _vector(z),
        "points": [
            {
                "t": [_num(complex(v)) for v in p.t],
                "hess": _num(complex(p.hessian)),
                "residual": _fixed(p.residual),
            }
            for p in points
        ],
        "expected_count": critalg.expected_critical_count(family),
    }
    _emit(report, args)
    return 0 if len(points) == report["expected_count"] else 1


def _cmd_potential(args):
    raw, family, z = _family_from_args(args)
    cfg = RunSettings(raw, args)
    zz = z.z if z is not None else sample_good_point(family, seed=cfg.seed).z
    tuples = raw.get("tuples")
    if tuples is not None:
        tuples = [tuple(t) for t in tuples]
    else:
        rng = random.Random(cfg.seed)
        tuples = [
            tuple(rng.randint(1, family.n) for _ in range(2 * family.k + 1))
            for _ in range(cfg.samples)
        ]
    rows = [
        frobenius.potential_derivative_row(family, zz, tup, cfg.anchor)
        for tup in tuples
    ]
    passed = all(r["abs_err"] == 0.0 for r in rows)
    report = {
        "schema": report_schema_version(),
        "z": _vector(zz),
        "P": _num(frobenius.potential_first(family, zz, cfg.anchor)),
        "derivatives": rows,
        "passed": passed,
    }
    _emit(report, args)
    return 0 if passed else 1


def _cmd_gm_flow(args):
    raw, family, z = _family_from_args(args)
    cfg = RunSettings(raw, args)
    if "path" in raw:
        path = [tuple(parse_rational(v) for v in p) for p in raw["path"]]
    else:
        path = _usable_path(family, cfg.seed + 13, waypoints=2)
    kappa = (
        parse_rational(raw["kappa"]) if "kappa" in raw else _default_kappa(family)
    )
    start = singular_subspace(family).basis[0]
    result = gaussmanin.flow_flat_section(
        family, path, kappa, start, rtol=cfg.tol if cfg.tol < 1e-8 else 1e-10,
        record=True,
    )
    lines = [json.dumps(row, sort_keys=True) for row in result.trajectory]
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        for line in lines:
            print(line)
    print(
        f"steps={result.steps} rejected={result.rejected} "
        f"extras={len(result.extras)}",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="arrfrob",
        description="Verification suites for weighted hyperplane-family structures.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in ("check", "circuits", "basis", "critical", "potential", "gm-flow"):
        p = sub.add_parser(verb)
        p.add_argument("--config", default=None)
        p.add_argument("--suites", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--json", default=None)
        p.add_argument("--anchor", type=int, default=None)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "check": _cmd_check,
        "circuits": _cmd_circuits,
        "basis": _cmd_basis,
        "critical": _cmd_critical,
        "potential": _cmd_potential,
        "gm-flow": _cmd_gm_flow,
    }
    try:
        # validate suite names before touching the config so bad names fail
        # fast with a config-error exit
        if args.suites is not None:
            _parse_suites(args.suites)
        code = handlers[args.verb](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
