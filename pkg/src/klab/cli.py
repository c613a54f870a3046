"""Command-line driver: verification suites, parameter sweeps, range tables.

Three subcommands:

- ``klab verify --suite NAME`` runs one of the named invariant suites and
  prints a pass/fail line per check (exit 1 on any failure);
- ``klab sweep --config cfg.json --out table.csv [--jobs N]`` evaluates the
  trilinear form against a chosen bound formula over a parameter grid and
  writes a deterministic CSV (rows sorted by grid coordinates, floats at 17
  significant digits) plus a JSON sidecar with the max observed lhs/rhs
  ratio;
- ``klab ranges --q p/q [--corollary fr|new]`` prints the exact admissible
  N-exponent ceilings per corollary variant.

Exit codes: 0 pass, 1 invariant failure, 2 usage/config error.  The grid
cap defaults to 10^6 points and can be overridden with KLAB_GRID_CAP.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import os
import random
import re
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Sequence

from . import arith, bounds, dispersion, forms, sequences

__all__ = [
    "ConfigError",
    "CheckResult",
    "run_verify",
    "run_sweep",
    "run_ranges",
    "role_seed",
    "main",
    "entrypoint",
]

DEFAULT_GRID_CAP = 10**6
GRID_AXES = ("M", "N", "A", "Q", "R", "theta", "a", "seed")
_AXIS_DEFAULTS = {"Q": [1], "R": [1], "theta": [1], "a": [1], "seed": [0]}
_CONFIG_KEYS = {"grid", "sequences", "bound", "cutoff", "limits", "seed"}
_BOUND_KEYS = {"formula", "epsilon", "exponent_variant"}
_CUTOFF_KEYS = {"support", "plateau", "quadrature_tolerance"}
_LIMITS_KEYS = {"grid_cap"}
_ROLE_OFFSET = {"alpha": 1, "beta": 2, "nu": 3}


class ConfigError(ValueError):
    """Malformed sweep configuration."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def role_seed(seed: int, role: str) -> int:
    """Deterministic per-role seed derivation used by sweeps (documented so
    any CSV row can be recomputed from its coordinates alone)."""
    return seed * 4 + _ROLE_OFFSET[role]


def _parse_kind(kind: str) -> tuple[str, int | None]:
    m = re.fullmatch(r"tau_k:(\d+)", kind)
    if m:
        return "tau_k", int(m.group(1))
    if kind in ("ones", "moebius", "random_unit"):
        return kind, None
    raise ConfigError(f"unknown sequence kind {kind!r} (expected ones, moebius, random_unit or tau_k:K)")


def _build_role(kind: str, base: int, seed: int, role: str) -> sequences.CoefficientSequence:
    name, k = _parse_kind(kind)
    rng = sequences.DyadicRange(base)
    if name == "tau_k":
        return sequences.build_sequence("tau_k", rng, k=k)
    if name == "random_unit":
        return sequences.build_sequence("random_unit", rng, seed=role_seed(seed, role))
    return sequences.build_sequence(name, rng)


def grid_cap() -> int:
    env = os.environ.get("KLAB_GRID_CAP")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"KLAB_GRID_CAP must be an integer, got {env!r}") from None
    return DEFAULT_GRID_CAP


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    grid = cfg.get("grid")
    if not isinstance(grid, dict) or not grid:
        raise ConfigError("config needs a nonempty 'grid' object")
    bad_axes = set(grid) - set(GRID_AXES)
    if bad_axes:
        raise ConfigError(f"unknown grid axes: {sorted(bad_axes)} (allowed: {GRID_AXES})")
    for axis in ("M", "N", "A"):
        if axis not in grid:
            raise ConfigError(f"grid is missing required axis {axis!r}")
    for axis, vals in grid.items():
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"grid axis {axis!r} must be a nonempty list")
        if not all(isinstance(v, int) for v in vals):
            raise ConfigError(f"grid axis {axis!r} must hold integers")
        if axis in ("M", "N", "A", "Q", "R") and any(v < 1 for v in vals):
            raise ConfigError(f"grid axis {axis!r} must hold positive integers")
        if axis == "theta" and any(v == 0 for v in vals):
            raise ConfigError("grid axis 'theta' must not contain 0")
    seqs = cfg.get("sequences", {})
    if not isinstance(seqs, dict) or set(seqs) - set(_ROLE_OFFSET):
        raise ConfigError(f"'sequences' must map roles among {tuple(_ROLE_OFFSET)}")
    for role in _ROLE_OFFSET:
        _parse_kind(seqs.get(role, "random_unit"))
    bound = cfg.get("bound", {})
    if not isinstance(bound, dict) or set(bound) - _BOUND_KEYS:
        raise ConfigError(f"'bound' keys must be among {sorted(_BOUND_KEYS)}")
    formula = bound.get("formula", "bcr")
    if formula not in ("bcr", "bc"):
        raise ConfigError(f"bound.formula must be 'bcr' or 'bc', got {formula!r}")
    variant = bound.get("exponent_variant", "statement")
    if variant not in ("statement", "proof"):
        raise ConfigError(f"bound.exponent_variant must be 'statement' or 'proof', got {variant!r}")
    cutoff = cfg.get("cutoff", {})
    if not isinstance(cutoff, dict) or set(cutoff) - _CUTOFF_KEYS:
        raise ConfigError(f"'cutoff' keys must be among {sorted(_CUTOFF_KEYS)}")
    if cutoff:
        try:
            dispersion.SmoothCutoff(
                plateau=tuple(cutoff.get("plateau", (1.0, 2.0))),
                support=tuple(cutoff.get("support", (0.5, 2.5))),
                quadrature_tolerance=cutoff.get("quadrature_tolerance", 1e-10),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid cutoff: {exc}") from None
    limits = cfg.get("limits", {})
    if not isinstance(limits, dict) or set(limits) - _LIMITS_KEYS:
        raise ConfigError(f"'limits' keys must be among {sorted(_LIMITS_KEYS)}")
    if "seed" in cfg and not isinstance(cfg["seed"], int):
        raise ConfigError("'seed' must be an integer")
    return cfg


def _grid_points(cfg: dict) -> list[dict]:
    grid = dict(cfg["grid"])
    for axis, default in _AXIS_DEFAULTS.items():
        grid.setdefault(axis, [cfg.get("seed", default[0])] if axis == "seed" else list(default))
    axes_values = [sorted(set(grid[axis])) for axis in GRID_AXES]
    count = math.prod(len(v) for v in axes_values)
    cap = cfg.get("limits", {}).get("grid_cap", grid_cap())
    env = os.environ.get("KLAB_GRID_CAP")
    if env is not None:
        cap = grid_cap()
    if count > cap:
        raise ConfigError(f"grid has {count} points, exceeding the cap of {cap}")
    return [dict(zip(GRID_AXES, combo)) for combo in itertools.product(*axes_values)]


_TERM_COUNT = {"bcr": 5, "bc": 2}


def _sweep_point(task: dict) -> dict:
    """Evaluate one grid point: |trilinear form| against the chosen bound."""
    pt = task["point"]
    kinds = task["kinds"]
    epsilon = task["epsilon"]
    formula = task["formula"]
    variant = task["variant"]
    alpha = _build_role(kinds["alpha"], pt["M"], pt["seed"], "alpha")
    beta = _build_role(kinds["beta"], pt["N"], pt["seed"], "beta")
    nu = _build_role(kinds["nu"], pt["A"], pt["seed"], "nu")
    spec = forms.TrilinearSpec(alpha, beta, nu, theta=pt["theta"], R=pt["R"])
    result = forms.trilinear_form(spec)
    lhs = abs(result.value)
    norms = (alpha.l2_norm, beta.l2_norm, nu.l2_norm)
    if formula == "bcr":
        rhs = bounds.rhs_trilinear_fixed_factor(
            pt["M"], pt["N"], pt["A"], pt["R"], pt["theta"], norms, epsilon, variant
        )
    else:
        rhs = bounds.rhs_trilinear_coprime(pt["M"], pt["N"], pt["A"], pt["theta"], norms, epsilon)
    ratio = lhs / rhs.total if rhs.total > 0 else math.nan
    row = dict(pt)
    row["lhs"] = lhs
    row["rhs_total"] = rhs.total
    row["ratio"] = ratio
    row["terms"] = result.terms
    for i, (_, val) in enumerate(rhs.terms, start=1):
        row[f"term{i}"] = val
    row["flags"] = ";".join(rhs.flags)
    return row


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def run_sweep(config_path: str, out_path: str, jobs: int = 1) -> dict:
    """Run a sweep; returns the summary dict written to the JSON sidecar."""
    cfg = load_config(config_path)
    points = _grid_points(cfg)
    seqs = cfg.get("sequences", {})
    kinds = {role: seqs.get(role, "random_unit") for role in _ROLE_OFFSET}
    bound = cfg.get("bound", {})
    formula = bound.get("formula", "bcr")
    epsilon = float(bound.get("epsilon", 0.01))
    variant = bound.get("exponent_variant", "statement")
    tasks = [
        {"point": pt, "kinds": kinds, "epsilon": epsilon, "formula": formula, "variant": variant}
        for pt in points
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        rows = [_sweep_point(t) for t in tasks]
    rows.sort(key=lambda r: tuple(r[axis] for axis in GRID_AXES))

    header = list(GRID_AXES) + ["lhs", "rhs_total", "ratio", "terms"]
    header += [f"term{i}" for i in range(1, _TERM_COUNT[formula] + 1)]
    header += ["flags"]
    out_dir = os.path.dirname(os.path.abspath(out_path)) or "."
    os.makedirs(out_dir, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=out_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(row[col]) for col in header])
        os.replace(tmp_path, out_path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise

    reports = [
        bounds.BoundReport(
            row["lhs"],
            bounds.RhsReport((), 1.0, row["rhs_total"]),
            params={axis: row[axis] for axis in GRID_AXES},
        )
        for row in rows
        if row["rhs_total"] > 0
    ]
    summary = {
        "points": len(rows),
        "degenerate_points": len(rows) - len(reports),
        "formula": formula,
        "epsilon": epsilon,
        "exponent_variant": variant,
    }
    if reports:
        estimate = bounds.implied_constant_estimate(reports)
        summary["max_ratio"] = estimate.max_ratio
        summary["argmax"] = dict(estimate.argmax_params)
    else:
        summary["max_ratio"] = None
        summary["argmax"] = None
    with open(out_path + ".summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def run_ranges(q_text: str, corollary: str = "new", out: str | None = None) -> str:
    """Exact N-exponent ceilings for both corollaries at the given Q-exponent."""
    q = bounds.parse_exponent(q_text)
    order = [corollary] + [c for c in ("new", "fr") if c != bounds._corollary_key(corollary)]
    lines = [f"q-exponent: {q}"]
    ceilings: dict[str, Fraction] = {}
    for cor in order:
        key = bounds._corollary_key(cor)
        ci = bounds.admissible_n_exponent(key, "i", q)
        ceilings[key] = ci.ceiling
        status = "feasible" if ci.feasible else "infeasible (negative ceiling)"
        lines.append(f"[{key}] variant (i):   N <= X^({ci.ceiling})  [{status}]")
        for var in ("ii", "iii"):
            cv = bounds.admissible_n_exponent(key, var, q)
            adm = "admissible" if cv.q_admissible else "not admissible"
            lines.append(
                f"[{key}] variant ({var}): N <= X^({cv.ceiling}), needs Q <= X^({cv.extremal_q})"
                f"  [q {adm}]"
            )
    delta = ceilings["new"] - ceilings["fr"]
    lines.append(f"variant (i) improvement (new - fr): {delta}")
    lines.append(
        f"extremal q-exponent (ceiling hits 0): new {bounds.extremal_q_exponent('new')}, "
        f"fr {bounds.extremal_q_exponent('fr')}"
    )
    table = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(table)
    return table


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------


def _suite_arith() -> list[CheckResult]:
    checks = []
    bad = sum(
        1
        for m in range(1, 201)
        for n in range(1, 201)
        if gcd(m, n) == 1
        and (m * arith.mod_inverse(m, n).value + n * arith.mod_inverse(n, m).value) % (m * n)
        != 1 % (m * n)
    )
    checks.append(CheckResult("arith.reciprocity_coprime_pairs_200", bad == 0, f"{bad} failures"))

    rng = random.Random(20260809)
    bad = 0
    for _ in range(10_000):
        m = rng.randrange(2, 1 << 48)
        a = rng.randrange(1, m)
        while gcd(a, m) != 1:
            a = rng.randrange(1, m)
        if a * arith.mod_inverse(a, m).value % m != 1:
            bad += 1
    checks.append(CheckResult("arith.inverse_identity_random_1e4", bad == 0, f"{bad} failures"))

    m = 10**9 + 7
    vals = [rng.randrange(1, m) for _ in range(1000)]
    batch = arith.batch_mod_inverse(vals, m)
    ok = all(b.value == arith.mod_inverse(v, m).value for v, b in zip(vals, batch))
    checks.append(CheckResult("arith.batch_matches_scalar_1000", ok))

    bad = 0
    for n in range(1, 100_001):
        s = arith.squarefree_squarefull_split(n)
        if s.product != n or gcd(s.squarefree_part, s.squarefull_part) != 1:
            bad += 1
    checks.append(CheckResult("arith.split_recombines_1e5", bad == 0, f"{bad} failures"))

    bad = 0
    for n in range(1, 2001):
        count = 0
        for d in range(1, n + 1):
            if n % d == 0 and gcd(d, n // d) == 1:
                if arith.is_squarefree(d) and arith.is_squarefull(n // d):
                    count += 1
        if count != 1:
            bad += 1
    checks.append(CheckResult("arith.split_unique_pair_scan_2000", bad == 0, f"{bad} failures"))
    return checks


def decomposition_grid() -> list[tuple[forms.TrilinearSpec, str]]:
    """The fixed direct-vs-decomposed test grid (>= 240 specs)."""
    specs = []
    for mb in (4, 8, 16):
        for nb in (4, 8, 16):
            for ab in (2, 4):
                for R in (1, 2, 3, 6, 12):
                    for theta in (1, -3):
                        key = f"M{mb}N{nb}A{ab}R{R}t{theta}"
                        ones = lambda b: sequences.build_sequence("ones", sequences.DyadicRange(b))
                        specs.append(
                            (
                                forms.TrilinearSpec(ones(mb), ones(nb), ones(ab), theta, R),
                                f"ones:{key}",
                            )
                        )
                        seed = hash((mb, nb, ab, R, theta)) % (1 << 30)
                        ru = lambda b, s: sequences.build_sequence(
                            "random_unit", sequences.DyadicRange(b), seed=s
                        )
                        specs.append(
                            (
                                forms.TrilinearSpec(
                                    ru(mb, seed + 1), ru(nb, seed + 2), ru(ab, seed + 3), theta, R
                                ),
                                f"random:{key}",
                            )
                        )
    return specs


def _suite_decomposition() -> list[CheckResult]:
    worst = 0.0
    bad = 0
    n = 0
    for spec, _ in decomposition_grid():
        direct = forms.mean_square_direct(spec)
        decomposed = forms.mean_square_decomposed(spec)
        dev = abs(direct - decomposed) / (1.0 + abs(direct))
        worst = max(worst, dev)
        bad += dev > 1e-9
        n += 1
    return [
        CheckResult(
            "forms.decomposition_identity_grid",
            bad == 0,
            f"{n} specs, worst relative deviation {worst:.3e}",
        )
    ]


def random_unit_specs(count: int, seed: int = 7) -> list[forms.TrilinearSpec]:
    rng = random.Random(seed)
    specs = []
    for _ in range(count):
        mb = rng.choice((4, 6, 8, 12, 16))
        nb = rng.choice((4, 6, 8, 12, 16))
        ab = rng.choice((2, 3, 4))
        R = rng.choice((1, 2, 3, 4, 6))
        theta = rng.choice((1, -1, 2, -2, 3, -3))
        mk = lambda b: sequences.build_sequence(
            "random_unit", sequences.DyadicRange(b), seed=rng.randrange(1 << 30)
        )
        specs.append(forms.TrilinearSpec(mk(mb), mk(nb), mk(ab), theta, R))
    return specs


def _suite_cauchy_schwarz() -> list[CheckResult]:
    checks = []
    worst = -math.inf
    bad = 0
    for spec in random_unit_specs(100):
        lhs = abs(forms.trilinear_form(spec).value)
        rhs = spec.alpha.l2_norm * math.sqrt(forms.mean_square_direct(spec))
        gap = lhs - rhs
        worst = max(worst, gap)
        bad += gap > 1e-12
    checks.append(
        CheckResult(
            "forms.cs_chain_100_random_unit_specs", bad == 0, f"worst lhs-rhs gap {worst:.3e}"
        )
    )

    # negating theta conjugates the form; for complex coefficients the
    # sequences must be conjugated alongside
    bad = 0
    worst = 0.0
    for spec in random_unit_specs(25, seed=11):
        plus = forms.trilinear_form(spec).value
        conj_seq = lambda s: sequences.make_sequence(
            {n: v.conjugate() for n, v in s.values.items()}, s.support
        )
        minus_spec = forms.TrilinearSpec(
            conj_seq(spec.alpha), conj_seq(spec.beta), conj_seq(spec.nu), -spec.theta, spec.R
        )
        minus = forms.trilinear_form(minus_spec).value
        dev = abs(minus - plus.conjugate())
        worst = max(worst, dev)
        bad += dev > 1e-12
    for spec, _ in decomposition_grid()[:40:2]:  # ones sequences: real case
        plus = forms.trilinear_form(spec).value
        minus_spec = forms.TrilinearSpec(spec.alpha, spec.beta, spec.nu, -spec.theta, spec.R)
        dev = abs(forms.trilinear_form(minus_spec).value - plus.conjugate())
        worst = max(worst, dev)
        bad += dev > 1e-12
    checks.append(
        CheckResult("forms.conjugation_symmetry", bad == 0, f"worst |dev| {worst:.3e}")
    )

    bad = 0
    for spec, _ in decomposition_grid()[:120]:
        for b in (1, 2, 4):
            cb = forms.squarefree_mean_square(spec, b)
            cap = (
                spec.nu.l2_norm**2
                * spec.beta.l2_norm**2
                * len(spec.nu.support_indices())
                * len(spec.m_indices())
                * len(spec.beta.support_indices())
            )
            bad += cb > cap + 1e-9
    checks.append(CheckResult("forms.trivial_bound_counting_inequality", bad == 0))
    return checks


def dispersion_toy_grids(count: int = 20) -> list[dict]:
    """Real-sequence toy grids for the dispersion checks."""
    rng = random.Random(42)
    grids = []
    kinds = ("ones", "moebius", ("tau_k", 2), "random_real")
    while len(grids) < count:
        mb = rng.choice((2, 3, 4))
        nb = rng.choice((2, 3, 4))
        qb = rng.choice((2, 3, 4))
        a = rng.choice((1, 2, 3, 5))
        kind_a = rng.choice(kinds)
        kind_b = rng.choice(kinds)

        def mk(kind, base):
            drange = sequences.DyadicRange(base)
            if kind == "random_real":
                vals = [complex(rng.uniform(-1, 1)) for _ in drange]
                return sequences.build_sequence("explicit", drange, values=vals)
            if isinstance(kind, tuple):
                return sequences.build_sequence(kind[0], drange, k=kind[1])
            return sequences.build_sequence(kind, drange)

        grids.append(
            {
                "alpha": mk(kind_a, mb),
                "beta": mk(kind_b, nb),
                "moduli": sequences.DyadicRange(qb),
                "a": a,
                "m_scale": float(mb),
            }
        )
    return grids


def _suite_dispersion() -> list[CheckResult]:
    checks = []
    psi = dispersion.SmoothCutoff()
    worst_q = 0.0
    worst_gap = math.inf
    bad_q = bad_gap = bad_c = bad_e = 0
    for grid in dispersion_toy_grids():
        split = dispersion.dispersion_split(
            grid["alpha"], grid["beta"], grid["moduli"], grid["a"], psi, grid["m_scale"]
        )
        # quadratic identity against an independent recomputation
        lhs_q = 0.0
        for m in psi.window(grid["m_scale"]):
            x = y = 0j
            for q in grid["moduli"]:
                cq = split.c[q]
                if cq == 0:
                    continue
                phi_q = arith.euler_phi(q)
                for n, bv in grid["beta"].values.items():
                    if (m * n - grid["a"]) % q == 0:
                        x += cq * bv
                    if gcd(m * n, q) == 1:
                        y += cq / phi_q * bv
            lhs_q += psi(m / grid["m_scale"]) * abs(x - y) ** 2
        dev = abs(lhs_q - split.quadratic()) / (1.0 + abs(lhs_q))
        worst_q = max(worst_q, dev)
        bad_q += dev > 1e-9

        delta = dispersion.progression_error_total(
            grid["alpha"], grid["beta"], grid["moduli"], grid["a"]
        )
        gap = dispersion.cauchy_schwarz_gap(split, grid["alpha"].l2_norm, delta)
        worst_gap = min(worst_gap, gap)
        bad_gap += gap < -1e-9

        for q in grid["moduli"]:
            cq = split.c[q]
            if cq not in (-1, 0, 1) or (cq == 0) != (gcd(grid["a"], q) > 1):
                bad_c += 1
        direct = math.fsum(
            abs(dispersion.progression_error(grid["alpha"], grid["beta"], q, grid["a"]))
            for q in grid["moduli"]
            if gcd(q, grid["a"]) == 1
        )
        bad_e += direct != delta
    checks.append(
        CheckResult("dispersion.quadratic_identity_20_grids", bad_q == 0, f"worst {worst_q:.3e}")
    )
    checks.append(
        CheckResult("dispersion.majorant_inequality_20_grids", bad_gap == 0, f"min gap {worst_gap:.3e}")
    )
    checks.append(CheckResult("dispersion.sign_sequence_domain", bad_c == 0))
    checks.append(CheckResult("dispersion.error_sum_consistency", bad_e == 0))
    return checks


def _suite_fourier() -> list[CheckResult]:
    checks = []
    psi = dispersion.SmoothCutoff()
    worst = 0.0
    for m_scale in (500.0, 1000.0):
        for q in (1, 3, 5):
            h = dispersion.default_completion_bandwidth(q, m_scale)
            res = dispersion.completed_progression_sum(psi, m_scale, q, 1, h)
            worst = max(worst, res.residual)
    checks.append(
        CheckResult("dispersion.completion_residual_small", worst <= 1e-6, f"worst {worst:.3e}")
    )
    worst_c = 0.0
    for q in (1, 6, 12):
        res = dispersion.completed_coprime_sum(psi, 500.0, q)
        worst_c = max(worst_c, res.c_observed)
    checks.append(
        CheckResult("dispersion.coprime_main_term", worst_c <= 5.0, f"worst constant {worst_c:.3e}")
    )
    return checks


def _suite_exponents() -> list[CheckResult]:
    checks = []
    f = Fraction
    got = bounds.admissible_n_exponent("new", "i", f(1, 2)).ceiling
    checks.append(CheckResult("bounds.new_i_at_half", got == f(1, 56), f"ceiling {got}"))
    got = bounds.admissible_n_exponent("fr", "i", f(1, 2)).ceiling
    checks.append(CheckResult("bounds.fr_i_at_half", got == f(1, 72), f"ceiling {got}"))
    ext = bounds.extremal_q_exponent("new")
    checks.append(
        CheckResult(
            "bounds.extremal_q_is_half_plus_1_66", ext == f(17, 33) == f(1, 2) + f(1, 66), f"{ext}"
        )
    )
    caps_ok = (
        bounds.COROLLARY_TABLES["new"]["q_cap"] == f(45, 89)
        and bounds.COROLLARY_TABLES["fr"]["q_cap"] == f(53, 105)
        and f(45, 89) > f(53, 105)
    )
    checks.append(CheckResult("bounds.q_caps_45_89_beats_53_105", caps_ok))
    improved = all(
        bounds.admissible_n_exponent("new", "i", q).ceiling
        >= bounds.admissible_n_exponent("fr", "i", q).ceiling
        for k in range(0, 101)
        for q in [f(1, 2) + (f(17, 33) - f(1, 2)) * k / 100]
        if 0 < q < 1
    )
    checks.append(CheckResult("bounds.new_ceiling_dominates_on_range", improved))
    return checks


SUITES: dict[str, Callable[[], list[CheckResult]]] = {
    "arith": _suite_arith,
    "decomposition": _suite_decomposition,
    "cauchy_schwarz": _suite_cauchy_schwarz,
    "dispersion": _suite_dispersion,
    "fourier": _suite_fourier,
    "exponents": _suite_exponents,
}


def run_verify(suite: str) -> tuple[int, list[CheckResult]]:
    """Run one suite; returns (exit_code, results)."""
    fn = SUITES.get(suite)
    if fn is None:
        return 2, [CheckResult(f"unknown suite {suite!r}", False)]
    results = fn()
    code = 0 if all(r.passed for r in results) else 1
    return code, results


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="klab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run an invariant suite")
    p_verify.add_argument("--suite", required=True, help=f"one of {sorted(SUITES)}")

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep to CSV")
    p_sweep.add_argument("--config", required=True, help="JSON sweep configuration")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_sweep.add_argument(
        "--exponent-variant", choices=("statement", "proof"), default=None,
        help="override the bound's exponent variant",
    )

    p_ranges = sub.add_parser("ranges", help="exact exponent-range table")
    p_ranges.add_argument("--q", required=True, help="Q-exponent as a rational p/q")
    p_ranges.add_argument("--corollary", choices=("fr", "new"), default="new")
    p_ranges.add_argument("--out", default=None, help="also write the table to this path")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "verify":
            code, results = run_verify(args.suite)
            for r in results:
                status = "PASS" if r.passed else "FAIL"
                detail = f"  ({r.detail})" if r.detail else ""
                print(f"{status} {r.name}{detail}")
            if code == 2:
                print(f"error: unknown suite; choose from {sorted(SUITES)}", file=sys.stderr)
            return code
        if args.command == "sweep":
            if args.jobs < 1:
                raise ConfigError("--jobs must be >= 1")
            cfg_override = None
            if args.exponent_variant is not None:
                cfg = load_config(args.config)
                cfg.setdefault("bound", {})["exponent_variant"] = args.exponent_variant
                fd, cfg_override = tempfile.mkstemp(suffix=".json")
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    json.dump(cfg, fh)
            try:
                summary = run_sweep(cfg_override or args.config, args.out, args.jobs)
            finally:
                if cfg_override:
                    os.unlink(cfg_override)
            if summary["max_ratio"] is not None:
                print(
                    f"wrote {args.out} ({summary['points']} rows); "
                    f"max ratio {summary['max_ratio']:.6g} at {summary['argmax']}"
                )
            else:
                print(f"wrote {args.out} ({summary['points']} rows); all rows degenerate")
            return 0
        if args.command == "ranges":
            print(run_ranges(args.q, args.corollary, args.out), end="")
            return 0
    except (ConfigError, bounds.InvalidExponent) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2  # pragma: no cover


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
