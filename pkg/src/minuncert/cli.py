"""Command-line front end: verification battery, scans and table emission.

Every command writes one deterministic flat file (CSV or JSON) and
reports through the exit code: 0 all good, 1 a check or grid point
failed, 2 the invocation itself was invalid.  Identical configurations
produce byte-identical files, so the outputs are safe regression
anchors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import multipartite
from .bipartite import (
    f_profile,
    fock_coeff,
    fock_normalization_defect,
    overlap,
    r_closed,
    residual_norm_sq,
    shell_identity_check,
    shell_sum,
    uncertainty_product,
)
from .multipartite import g_family, h_family, z4_product, z6_product
from .quadrature import QuadratureError, integrate_semi_infinite
from .simple_state import minimize_q0, q0
from .spectral import build_q_form, min_eigenpair
from .specfun import Tolerance, binom, ellip_k

__all__ = ["RunConfig", "main", "run_verify", "run_scan", "run_profile",
           "run_minimize_q", "run_fock", "run_overlap"]

_COMMANDS = ("verify", "scan", "profile", "minimize-q", "fock", "overlap")
_OUTPUT_DIR_ENV = "MINUNCERT_OUTPUT_DIR"

_DEFAULT_SCAN_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))
_DEFAULT_PROFILE_GRID = (0.1, 0.5, 0.9)
_DEFAULT_OVERLAP_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)
_DEFAULT_FOCK_GRID = (0.5,)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    parties: int
    xi_grid: tuple
    truncation: int
    tol: Tolerance
    output_path: str
    format: str

    def __post_init__(self):
        if self.command not in _COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.parties not in (2, 4, 6):
            raise UsageError(f"parties must be 2, 4 or 6, got {self.parties}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.format!r}")
        if self.truncation < 1:
            raise UsageError(f"order must be positive, got {self.truncation}")
        prev = 0.0
        for x in self.xi_grid:
            if not (0.0 < x < 1.0):
                raise UsageError(f"xi values must lie strictly inside (0, 1), got {x!r}")
            if x <= prev:
                raise UsageError("xi grid must be strictly increasing")
            prev = x


def _expand_xi_token(token: str):
    parts = token.split(":")
    if len(parts) == 1:
        try:
            return [float(token)]
        except ValueError:
            raise UsageError(f"bad --xi value {token!r}") from None
    if len(parts) != 3:
        raise UsageError(f"--xi range must look like a:b:step, got {token!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"bad --xi range {token!r}") from None
    if step <= 0.0 or hi < lo:
        raise UsageError(f"--xi range needs a <= b and step > 0, got {token!r}")
    out = []
    k = 0
    while True:
        x = lo + k * step
        if x > hi + 1e-12 * step:
            break
        out.append(x)
        k += 1
    return out


def _default_grid(command: str):
    if command == "scan":
        return _DEFAULT_SCAN_GRID
    if command == "profile":
        return _DEFAULT_PROFILE_GRID
    if command == "overlap":
        return _DEFAULT_OVERLAP_GRID
    if command == "fock":
        return _DEFAULT_FOCK_GRID
    return (0.5,)


def _default_order(command: str) -> int:
    if command in ("verify", "minimize-q"):
        return 200
    if command == "fock":
        return 8
    if command == "profile":
        return 81  # radial sample count over [0, 4]
    return 200


def parse_args(argv) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="minuncert",
        description="Minimum-uncertainty product verification and table emission.",
    )
    parser.add_argument("--command", choices=_COMMANDS, default="verify")
    parser.add_argument("--parties", type=int, default=2)
    parser.add_argument("--xi", action="append", metavar="X|A:B:STEP",
                        help="xi value or inclusive range; repeatable")
    parser.add_argument("--order", type=int, default=None,
                        help="truncation / sample-count knob of the command")
    parser.add_argument("--tol", type=float, default=None,
                        help="absolute tolerance for the cross-check quadratures")
    parser.add_argument("--out", default=None, help="output file path")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    ns = parser.parse_args(argv)

    if ns.xi:
        values = []
        for token in ns.xi:
            values.extend(_expand_xi_token(token))
        grid = tuple(sorted(set(values)))
    else:
        grid = _default_grid(ns.command)

    if ns.tol is not None and not ns.tol > 0.0:
        raise UsageError(f"--tol must be positive, got {ns.tol}")
    tol = Tolerance(abs_tol=ns.tol) if ns.tol is not None else Tolerance(
        abs_tol=1e-9, rel_tol=3e-7
    )

    out = ns.out
    if out is None:
        base = os.environ.get(_OUTPUT_DIR_ENV, ".")
        ext = "csv" if ns.format == "csv" else "json"
        out = os.path.join(base, f"{ns.command}.{ext}")

    return RunConfig(
        command=ns.command,
        parties=ns.parties,
        xi_grid=grid,
        truncation=ns.order if ns.order is not None else _default_order(ns.command),
        tol=tol,
        output_path=out,
        format=ns.format,
    )


# ---------------------------------------------------------------------------
# table writing


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def write_table(config: RunConfig, columns, rows) -> None:
    parent = os.path.dirname(config.output_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    if config.format == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_cell(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    else:
        doc = {
            "command": config.command,
            "parties": config.parties,
            "columns": list(columns),
            "rows": [[_json_safe(v) for v in row] for row in rows],
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    with open(config.output_path, "w", encoding="ascii", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# verify


def _run_checks(checks):
    rows = []
    all_ok = True
    for name, thunk in checks:
        try:
            value, reference, tol, passed = thunk()
            if passed is None:
                passed = abs(value - reference) <= tol
        except Exception as exc:
            print(f"verify: {name}: {exc}", file=sys.stderr)
            value, reference, tol, passed = float("nan"), float("nan"), 0.0, False
        if not passed:
            all_ok = False
        rows.append([name, float(value), float(reference), float(tol), bool(passed)])
    return rows, all_ok


def _b_table_mismatches() -> int:
    expected = {
        1: ((Fraction(1),), Fraction(1, 2)),
        2: ((Fraction(1), Fraction(2)), Fraction(1, 30)),
        3: ((Fraction(1), Fraction(9), Fraction(9, 2)), Fraction(1, 560)),
    }
    bad = 0
    for n, (table, prefactor) in expected.items():
        ops = multipartite.b_coefficients(n)
        if tuple(ops.b) != table or ops.prefactor != prefactor:
            bad += 1
    return bad


def _pascal_mismatches() -> int:
    bad = 0
    for n in range(1, 13):
        fwd, inv = multipartite.pascal_matrix_pair(n)
        for i in range(n):
            for j in range(n):
                acc = sum(fwd[i][k] * inv[k][j] for k in range(n))
                if acc != (1 if i == j else 0):
                    bad += 1
    return bad


def _pochhammer_worst() -> float:
    worst = Fraction(0)
    for n in range(1, 9):
        for j in range(n):
            res = abs(multipartite.pochhammer_root_residual(n, j))
            if res > worst:
                worst = res
    return float(worst)


def _fock_selection_leak() -> float:
    leak = 0.0
    for n in range(0, 11):
        for m in range(0, 11 - n):
            if n % 4 == m % 4 and n % 4 in (0, 2):
                continue
            leak = max(leak, abs(fock_coeff(n, m, 0.5)))
    return leak


def _shell_structure_error() -> float:
    v = 0.5
    kv = ellip_k(v)
    worst = 0.0
    for big_n in range(0, 7):
        closed = (math.pi / (2.0 * kv)) * binom(2 * big_n, big_n) ** 2 * (
            v * v / 16.0
        ) ** big_n
        worst = max(worst, abs(shell_sum(big_n, v) - closed))
    return worst


def _residual_route_gap(tol: Tolerance) -> float:
    prof = f_profile(0.7)
    coefs = (0.5, 1.0)
    coeff, rate = prof.squared_combo_envelope(coefs)

    def integrand(r):
        val = np.asarray(prof.derivative_combo(coefs, r))
        return val * val

    quad = integrate_semi_infinite(integrand, tol, rate, coeff).value
    return abs(quad - residual_norm_sq(0.7))


def _overlap_route_gap(tol: Tolerance) -> float:
    fa = f_profile(0.3)
    fb = f_profile(0.7)
    ca, la = fa.squared_combo_envelope((1.0,))
    cb, lb = fb.squared_combo_envelope((1.0,))

    def integrand(r):
        return np.asarray(fa.value(r)) * np.asarray(fb.value(r))

    quad = integrate_semi_infinite(
        integrand, tol, 0.5 * (la + lb), math.sqrt(ca * cb)
    ).value
    return abs(quad - overlap(0.3, 0.7))


def run_verify(config: RunConfig) -> int:
    tol = config.tol
    sol = minimize_q0()
    pair = min_eigenpair(build_q_form(config.truncation))
    product2 = 0.25 + sol.q_value

    def one_sided(value, bound, above):
        passed = value > bound if above else value < bound
        return value, bound, 0.0, passed

    checks = [
        ("q_min_eigenvalue", lambda: (pair.eigenvalue, -0.04495, 5e-4, None)),
        ("q_min_route_agreement",
         lambda: (abs(pair.eigenvalue - sol.q_value), 0.0, 1e-4, None)),
        ("xi_min", lambda: (sol.xi.value, 0.318674, 1e-3, None)),
        ("simple_state_product", lambda: (product2, 0.20505, 1e-3, None)),
        ("simple_state_violation", lambda: (0.25 / product2, 1.2192, 1e-3, None)),
        ("b_coefficients",
         lambda: (float(_b_table_mismatches()), 0.0, 0.0, None)),
        ("pascal_inverse", lambda: (float(_pascal_mismatches()), 0.0, 0.0, None)),
        ("pochhammer_roots", lambda: (_pochhammer_worst(), 0.0, 0.0, None)),
        ("shell_identity_check",
         lambda: (float(shell_identity_check(12)), 1.0, 0.0, None)),
        ("bipartite_product",
         lambda: (uncertainty_product(0.5).product, 0.18006, 1e-4, None)),
        ("bipartite_route_agreement",
         lambda: (abs(uncertainty_product(0.5).product
                      - uncertainty_product(0.5, "quadrature").product),
                  0.0, 1e-6, None)),
        ("f_route_agreement",
         lambda: (abs(f_profile(0.5).value(1.0)
                      - f_profile(0.5, "angular_integral").value(1.0)),
                  0.0, 1e-10, None)),
        ("residual_route_agreement",
         lambda: (_residual_route_gap(tol), 0.0, 1e-7, None)),
        ("overlap_identity", lambda: (overlap(0.3, 0.3), 1.0, 1e-10, None)),
        ("overlap_vacuum",
         lambda: (abs(overlap(0.5, 0.0) - fock_coeff(0, 0, 0.5)), 0.0, 1e-10, None)),
        ("overlap_route_agreement",
         lambda: (_overlap_route_gap(tol), 0.0, 1e-8, None)),
        ("fock_selection", lambda: (_fock_selection_leak(), 0.0, 0.0, None)),
        ("fock_defect",
         lambda: (fock_normalization_defect(0.5, 200), 0.0, 1e-6, None)),
        ("shell_sum_structure", lambda: (_shell_structure_error(), 0.0, 1e-12, None)),
    ]

    g2 = g_family(0.5, 2.0)
    g32 = g_family(0.5, 1.5)
    h = h_family(0.5)
    checks += [
        ("g_identity_a2",
         lambda: (abs(3.0 * g2.rk_norm(0) ** 2 + 4.0 * g2.rk_norm(1) ** 2 - 1.0),
                  0.0, 1e-6, None)),
        ("g_identity_a32",
         lambda: (abs(g32.rk_norm(0) ** 2 + 2.25 * g32.rk_norm(1) ** 2 - 1.0),
                  0.0, 1e-6, None)),
        ("h_identity",
         lambda: (abs(10.0 * h.rk_norm(0) ** 2 + 9.0 * h.rk_norm(1) ** 2 - 1.0),
                  0.0, 1e-6, None)),
        ("z4_above_infimum",
         lambda: one_sided(z4_product(0.5).product, 1.0 / 30.0, True)),
        ("z4_below_bound",
         lambda: one_sided(z4_product(0.5).product, 1.0 / 16.0, False)),
        ("z4_shortcut_agreement",
         lambda: (abs(z4_product(0.5).product
                      - (1.0 / 30.0) * 0.5 * (1.0 + r_closed(0.5))
                      / g2.rk_norm(0) ** 2),
                  0.0, 1e-6, None)),
        ("z6_above_infimum",
         lambda: one_sided(z6_product(0.5).product, 35.0 / 4096.0, True)),
        ("z6_below_bound",
         lambda: one_sided(z6_product(0.5).product, 1.0 / 64.0, False)),
        ("z6_shortcut_agreement",
         lambda: (abs(z6_product(0.5).product
                      - (1.0 / 560.0) * 0.5 * (1.0 + r_closed(0.5))
                      / (g32.rk_norm(0) ** 2 * h.rk_norm(0) ** 2)),
                  0.0, 1e-6, None)),
        ("alpha_beta_certificate",
         lambda: (multipartite.alpha_beta_certificate(), 0.0, 1e-10, None)),
    ]

    rows, all_ok = _run_checks(checks)
    write_table(config, ("check", "value", "reference", "tolerance", "passed"), rows)
    if not all_ok:
        failed = [row[0] for row in rows if not row[4]]
        print("verify: FAILED " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# scan


def _product_for(parties: int, x: float):
    if parties == 2:
        return uncertainty_product(x)
    if parties == 4:
        return z4_product(x)
    return z6_product(x)


def run_scan(config: RunConfig) -> int:
    two = config.parties == 2
    columns = ["xi", "product", "separable_bound", "infimum", "violation_ratio"]
    if two:
        columns += ["r_value", "q0"]
    rows = []
    soft_failures = []
    hard_failure = None
    for x in config.xi_grid:
        try:
            rep = _product_for(config.parties, x)
        except QuadratureError as exc:
            soft_failures.append(f"xi={x:g}: {exc}")
            rows.append([x] + [None] * (len(columns) - 1))
            continue
        except ValueError as exc:
            # a product outside its hard bounds is a broken invariant,
            # not a data point
            hard_failure = f"xi={x:g}: {exc}"
            break
        row = [x, rep.product, rep.separable_bound, rep.infimum, rep.violation_ratio]
        if two:
            row += [r_closed(x), q0(x)]
        rows.append(row)
    write_table(config, columns, rows)
    for note in soft_failures:
        print(f"scan: {note}", file=sys.stderr)
    if hard_failure:
        print(f"scan: aborted, {hard_failure}", file=sys.stderr)
        return 1
    return 1 if soft_failures else 0


# ---------------------------------------------------------------------------
# profile


def _profile_family(parties: int, x: float):
    if parties == 2:
        prof = f_profile(x)
        return prof.value
    fam = g_family(x) if parties == 4 else h_family(x)
    orient = 1.0 if fam.value(0.0) >= 0.0 else -1.0

    def value(r):
        return orient * np.asarray(fam.value(r))

    return value


def run_profile(config: RunConfig) -> int:
    n = config.parties // 2
    points = max(config.truncation, 2)
    r_grid = np.linspace(0.0, 4.0, points)
    front = math.sqrt(math.factorial(n) / math.pi**n)
    columns = ["r"] + [f"psi_xi={x:g}" for x in config.xi_grid]
    table = [r_grid]
    status = 0
    for x in config.xi_grid:
        value = _profile_family(config.parties, x)
        col = np.empty(points)
        try:
            # chunked so each shared-subdivision angular pass stays small
            for start in range(0, points, 16):
                block = r_grid[start:start + 16]
                col[start:start + len(block)] = front * np.asarray(
                    value(block ** (2 * n))
                )
        except QuadratureError as exc:
            print(f"profile: xi={x:g}: {exc}", file=sys.stderr)
            col[:] = np.nan
            status = 1
        table.append(col)
    rows = []
    for i in range(points):
        row = [float(table[0][i])]
        for c in range(1, len(table)):
            v = float(table[c][i])
            row.append(v if math.isfinite(v) else None)
        rows.append(row)
    write_table(config, columns, rows)
    return status


# ---------------------------------------------------------------------------
# the remaining table commands


def run_minimize_q(config: RunConfig) -> int:
    pair = min_eigenpair(build_q_form(config.truncation))
    sol = minimize_q0()
    columns = ("route", "order", "xi_min", "q_min", "product", "violation_ratio")
    rows = []
    for route, order, xi_min, q_min in (
        ("eigen", config.truncation, None, pair.eigenvalue),
        ("closed_form", None, sol.xi.value, sol.q_value),
    ):
        product = 0.25 + q_min
        rows.append([route, order, xi_min, q_min, product, 0.25 / product])
    write_table(config, columns, rows)
    gap = abs(pair.eigenvalue - sol.q_value)
    if gap > 1e-4:
        print(f"minimize-q: route disagreement {gap:.3e}", file=sys.stderr)
        return 1
    return 0


def run_fock(config: RunConfig) -> int:
    columns = ("xi", "n", "m", "mod4_class", "coeff")
    rows = []
    for x in config.xi_grid:
        for total in range(0, config.truncation + 1):
            for n in range(0, total + 1):
                m = total - n
                if n % 4 != m % 4 or n % 4 not in (0, 2):
                    continue
                rows.append([x, n, m, n % 4, fock_coeff(n, m, x)])
    write_table(config, columns, rows)
    return 0


def run_overlap(config: RunConfig) -> int:
    columns = ("xi_a", "xi_b", "overlap")
    rows = []
    for i, a in enumerate(config.xi_grid):
        for b in config.xi_grid[i:]:
            rows.append([a, b, overlap(a, b)])
    write_table(config, columns, rows)
    return 0


_RUNNERS = {
    "verify": run_verify,
    "scan": run_scan,
    "profile": run_profile,
    "minimize-q": run_minimize_q,
    "fock": run_fock,
    "overlap": run_overlap,
}


def main(argv=None) -> int:
    try:
        config = parse_args(argv)
    except UsageError as exc:
        print(f"minuncert: {exc}", file=sys.stderr)
        return 2
    try:
        return _RUNNERS[config.command](config)
    except UsageError as exc:
        print(f"minuncert: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
