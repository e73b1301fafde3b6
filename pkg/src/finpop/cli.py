"""Command-line front end.

Subcommands: moments, tail, t-tail, quadratic, table1, table2,
envelope, validate.  Reports are emitted as json (round-trippable),
csv (header row, plain "." decimals) or aligned text, to stdout or
--out.  A --config JSON file may hold any long-flag value; an explicit
flag always wins over the config key.

Reports carry no timestamps (the validate report's elapsed seconds are
the one exception), so identical (config, seed, workers) give
bit-identical report files.

Exit status: 0 success, 1 configuration error, 2 property failure
(validate), 3 numerical failure.

Monte Carlo tables draw each cell from its own stream,
seed + 1000003 * row_index, so adding or reordering x values does not
disturb other cells.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .bounds import implied_A, normal_tail, thm11_envelope, thm12_band
from .population import (
    Design,
    Population,
    compute_moments,
    family_power,
    load_population,
    standardize,
    valid_x_range,
)
from .sampling import (
    mc_tail_quadratic_tilt,
    mc_tail_sum,
    mc_tail_t,
    wilson_interval,
)
from .tilt import saddlepoint_tail, saddlepoint_tail_t
from . import validate as _validate

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PROPERTY = 2
EXIT_NUMERIC = 3

_SEED_STRIDE = 1000003


class CliError(Exception):
    """Configuration-level error; maps to exit status 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default, which this CLI reserves
    # for property failures; route parse errors through CliError instead
    def error(self, message):
        raise CliError(message)


def _parse_population(spec: str) -> tuple[Population, str]:
    if spec.startswith("power:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise CliError(f"population spec {spec!r} must be power:<N>:<alpha>")
        try:
            N = int(parts[1])
            alpha = float(parts[2])
        except ValueError as exc:
            raise CliError(f"bad power spec {spec!r}: {exc}") from None
        try:
            return family_power(N, alpha), spec
        except ValueError as exc:
            raise CliError(f"bad power family: {exc}") from None
    if spec.startswith("file:"):
        path = spec[5:]
        try:
            return load_population(path), spec
        except OSError as exc:
            raise CliError(f"cannot read population file: {exc}") from None
        except ValueError as exc:
            raise CliError(f"bad population file: {exc}") from None
    raise CliError(f"population spec {spec!r} must start with power: or file:")


def _parse_x_grid(raw) -> list[float]:
    """--x is repeatable and each occurrence may be a comma list."""
    vals: list[float] = []
    for item in raw:
        for tok in str(item).split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                vals.append(float(tok))
            except ValueError:
                raise CliError(f"bad x value {tok!r}") from None
    if not vals:
        raise CliError("empty x grid")
    return sorted(vals)


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise CliError("config must be a JSON object")
    return cfg


def _merged(ns, cfg: dict, key: str, default=None):
    """Explicit flag > config key > default."""
    flag = getattr(ns, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    if key in cfg:
        return cfg[key]
    return default


def _require(value, what: str):
    if value is None:
        raise CliError(f"missing required setting: {what}")
    return value


def _positive_int(value, what: str) -> int:
    try:
        iv = int(value)
    except (TypeError, ValueError):
        raise CliError(f"{what} must be an integer") from None
    if iv < 1:
        raise CliError(f"{what} must be >= 1")
    return iv


# ---------------------------------------------------------------------------
# report emission


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit(report: dict, fmt: str, out, columns: list[str] | None):
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    elif fmt == "csv":
        # row-less reports (moments) become a single key/value record
        rows = report.get("rows")
        if rows is None:
            columns = list(report)
            rows = [report]
        elif columns is None:
            columns = sorted({k for r in rows for k in r})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt_cell(r.get(c)) for c in columns])
        text = buf.getvalue()
    elif fmt == "text":
        lines = []
        scalars = [(k, v) for k, v in report.items() if k != "rows"]
        pad = max((len(k) for k, _ in scalars), default=0)
        for k, v in scalars:
            lines.append(f"{k.ljust(pad)}  {_fmt_cell(v)}")
        rows = report.get("rows", [])
        if rows:
            if columns is None:
                columns = sorted({k for r in rows for k in r})
            table = [columns] + [[_fmt_cell(r.get(c)) for c in columns] for r in rows]
            widths = [max(len(row[i]) for row in table) for i in range(len(columns))]
            lines.append("")
            for row in table:
                lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        text = "\n".join(lines) + "\n"
    else:
        raise CliError(f"unknown format {fmt!r}")

    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_moments(ns, cfg) -> tuple[dict, list[str] | None, int]:
    pop, label = _parse_population(_require(_merged(ns, cfg, "population"), "--population"))
    n = _positive_int(_require(_merged(ns, cfg, "n"), "--n"), "n")
    if not (1 <= n < pop.N):
        raise CliError(f"need 1 <= n < N, got n={n}, N={pop.N}")
    A = _merged(ns, cfg, "A", 1.0)
    m = compute_moments(pop)
    d = Design(N=pop.N, n=n)
    x_max_sum, x_max_band = valid_x_range(m, d, float(A))
    report = {
        "command": "moments",
        "population": label,
        "N": pop.N,
        "n": n,
        "A": float(A),
        "mu": m.mu,
        "sigma2": m.sigma2,
        "beta3N": m.beta3N,
        "max_dev": m.max_dev,
        "omega_N": d.omega_N,
        "p": d.p,
        "q": d.q,
        "x_max_sum": x_max_sum,
        "x_max_band": x_max_band,
    }
    return report, None, EXIT_OK


_TAIL_COLUMNS = [
    "x", "p_hat", "stderr", "normal_tail", "ratio", "ratio_stderr",
    "wilson_lo", "wilson_hi", "envelope_lower", "envelope_upper", "in_range",
    "saddlepoint", "degenerate",
]


def cmd_tail(ns, cfg, statistic: str) -> tuple[dict, list[str] | None, int]:
    pop, label = _parse_population(_require(_merged(ns, cfg, "population"), "--population"))
    n = _positive_int(_require(_merged(ns, cfg, "n"), "--n"), "n")
    if not (1 <= n < pop.N):
        raise CliError(f"need 1 <= n < N, got n={n}, N={pop.N}")
    x_grid = _parse_x_grid(_require(_merged(ns, cfg, "x"), "--x"))
    reps = _positive_int(_merged(ns, cfg, "reps", 100000), "reps")
    seed = int(_merged(ns, cfg, "seed", 0))
    workers = _positive_int(_merged(ns, cfg, "workers", 1), "workers")
    A = _merged(ns, cfg, "A")
    m = compute_moments(pop)
    d = Design(N=pop.N, n=n)
    if statistic == "quadratic":
        xi = float(_merged(ns, cfg, "xi", 0.0))
        xi1 = float(_merged(ns, cfg, "xi1", 0.0))
        h = float(_merged(ns, cfg, "h", 0.0))
    pop_std = standardize(pop)

    rows = []
    for i, x in enumerate(x_grid):
        cell_seed = seed + _SEED_STRIDE * i
        if statistic == "sum":
            est = mc_tail_sum(pop, d, x, reps, seed=cell_seed, workers=workers)
        elif statistic == "t":
            est = mc_tail_t(pop, d, x, reps, seed=cell_seed, workers=workers)
        else:
            est = mc_tail_quadratic_tilt(pop_std, d, x, xi, xi1, h, reps, seed=cell_seed, workers=workers)
        nt = normal_tail(x)
        lo, hi = wilson_interval(est.diagnostics["hits"], reps)
        row = {
            "x": x,
            "p_hat": est.p_hat,
            "stderr": est.stderr,
            "normal_tail": nt,
            "ratio": est.p_hat / nt if nt > 0 else None,
            "ratio_stderr": est.stderr / nt if nt > 0 else None,
            "wilson_lo": lo,
            "wilson_hi": hi,
            "seed": cell_seed,
        }
        if statistic == "t":
            row["degenerate"] = est.diagnostics["degenerate"]
        # the approximation column is best effort; the MC estimate is the deliverable
        if statistic in ("sum", "t") and x > 0:
            try:
                if statistic == "t":
                    row["saddlepoint"] = saddlepoint_tail_t(pop_std, d, x)
                else:
                    row["saddlepoint"] = saddlepoint_tail(pop_std, d, x * d.omega_N)
            except (ValueError, RuntimeError, ArithmeticError):
                pass
        if A is not None:
            env = thm11_envelope(x, m, d, float(A))
            _, x_max_band = valid_x_range(m, d, float(A))
            row["envelope_lower"] = env.lower
            row["envelope_upper"] = env.upper
            row["in_range"] = env.in_range if statistic == "sum" else bool(x <= x_max_band)
        rows.append(row)

    report = {
        "command": {"sum": "tail", "t": "t-tail", "quadratic": "quadratic"}[statistic],
        "statistic": statistic,
        "population": label,
        "N": pop.N,
        "n": n,
        "reps": reps,
        "seed": seed,
        "workers": workers,
        "rows": rows,
    }
    if A is not None:
        report["A"] = float(A)
    if statistic == "quadratic":
        report.update({"xi": xi, "xi1": xi1, "h": h})
    cols = _TAIL_COLUMNS + ["seed"]
    return report, cols, EXIT_OK


_DEFAULT_TABLE_FAMILIES = (
    ("k", 1.0, 1000, 250),
    ("k", 1.0, 100, 25),
    ("k^2", 2.0, 1000, 250),
    ("k^2", 2.0, 100, 25),
)


def _table_cells(ns, cfg):
    """Yield (family_label, population, n) table rows; --population overrides the default grid."""
    spec = _merged(ns, cfg, "population")
    if spec is not None:
        pop, label = _parse_population(spec)
        n = _positive_int(_require(_merged(ns, cfg, "n"), "--n"), "n")
        if not (1 <= n < pop.N):
            raise CliError(f"need 1 <= n < N, got n={n}, N={pop.N}")
        return [(label, pop, n)]
    return [
        (f"{fam}, N={N}", family_power(N, alpha), n)
        for fam, alpha, N, n in _DEFAULT_TABLE_FAMILIES
    ]


_TABLE1_COLUMNS = [
    "family", "N", "n", "x", "p_hat", "stderr", "hits", "degenerate",
    "normal_tail", "ratio", "ratio_stderr", "wilson_lo", "wilson_hi",
    "implied_A", "seed",
]


def cmd_table1(ns, cfg) -> tuple[dict, list[str] | None, int]:
    x_grid = _parse_x_grid(_merged(ns, cfg, "x", ["2,2.5,3"]))
    reps = _positive_int(_merged(ns, cfg, "reps", 1000000), "reps")
    seed = int(_merged(ns, cfg, "seed", 0))
    workers = _positive_int(_merged(ns, cfg, "workers", 1), "workers")
    if reps < 100000:
        print(f"warning: reps={reps} is below the recommended 100000", file=sys.stderr)

    rows = []
    idx = 0
    for fam_label, pop, n in _table_cells(ns, cfg):
        d = Design(N=pop.N, n=n)
        m = compute_moments(pop)
        for x in x_grid:
            cell_seed = seed + _SEED_STRIDE * idx
            est = mc_tail_t(pop, d, x, reps, seed=cell_seed, workers=workers)
            nt = normal_tail(x)
            ratio = est.p_hat / nt if nt > 0 else None
            lo, hi = wilson_interval(est.diagnostics["hits"], reps)
            rows.append({
                "family": fam_label,
                "N": pop.N,
                "n": n,
                "x": x,
                "p_hat": est.p_hat,
                "stderr": est.stderr,
                "hits": est.diagnostics["hits"],
                "degenerate": est.diagnostics["degenerate"],
                "normal_tail": nt,
                "ratio": ratio,
                "ratio_stderr": est.stderr / nt if nt > 0 else None,
                "wilson_lo": lo,
                "wilson_hi": hi,
                "implied_A": implied_A(ratio, x, m, d) if ratio and ratio > 0 and x > 0 else None,
                "seed": cell_seed,
            })
            idx += 1

    report = {
        "command": "table1",
        "reps": reps,
        "seed": seed,
        "workers": workers,
        "rows": rows,
    }
    return report, _TABLE1_COLUMNS, EXIT_OK


_TABLE2_COLUMNS = [
    "family", "N", "n", "x", "mc_p_hat", "mc_stderr", "saddlepoint",
    "ratio", "ratio_stderr", "seed", "note",
]


def cmd_table2(ns, cfg) -> tuple[dict, list[str] | None, int]:
    x_grid = _parse_x_grid(_merged(ns, cfg, "x", ["2,2.5,3"]))
    reps = _positive_int(_merged(ns, cfg, "reps", 1000000), "reps")
    seed = int(_merged(ns, cfg, "seed", 0))
    workers = _positive_int(_merged(ns, cfg, "workers", 1), "workers")
    if reps < 100000:
        print(f"warning: reps={reps} is below the recommended 100000", file=sys.stderr)

    rows = []
    idx = 0
    for fam_label, pop, n in _table_cells(ns, cfg):
        d = Design(N=pop.N, n=n)
        pop_std = standardize(pop)
        for x in x_grid:
            cell_seed = seed + _SEED_STRIDE * idx
            idx += 1
            row = {"family": fam_label, "N": pop.N, "n": n, "x": x, "seed": cell_seed}
            if x <= 0:
                row["note"] = "excluded: saddlepoint target must be positive"
                rows.append(row)
                continue
            try:
                sp = saddlepoint_tail_t(pop_std, d, x)
            except (ValueError, RuntimeError, ArithmeticError) as exc:
                # per-cell failure must not abort the table
                row["note"] = f"saddlepoint failed: {exc}"
                rows.append(row)
                continue
            est = mc_tail_t(pop, d, x, reps, seed=cell_seed, workers=workers)
            row.update({
                "mc_p_hat": est.p_hat,
                "mc_stderr": est.stderr,
                "saddlepoint": sp,
                "ratio": est.p_hat / sp,
                "ratio_stderr": est.stderr / sp,
            })
            rows.append(row)

    report = {
        "command": "table2",
        "reps": reps,
        "seed": seed,
        "workers": workers,
        "rows": rows,
    }
    return report, _TABLE2_COLUMNS, EXIT_OK


_ENVELOPE_COLUMNS = [
    "x", "normal_tail", "envelope_lower", "envelope_upper",
    "relative_band", "be_bound", "in_range_sum", "in_range_band",
]


def cmd_envelope(ns, cfg) -> tuple[dict, list[str] | None, int]:
    pop, label = _parse_population(_require(_merged(ns, cfg, "population"), "--population"))
    n = _positive_int(_require(_merged(ns, cfg, "n"), "--n"), "n")
    if not (1 <= n < pop.N):
        raise CliError(f"need 1 <= n < N, got n={n}, N={pop.N}")
    x_grid = _parse_x_grid(_require(_merged(ns, cfg, "x"), "--x"))
    A = float(_merged(ns, cfg, "A", 1.0))
    m = compute_moments(pop)
    d = Design(N=pop.N, n=n)
    x_max_sum, x_max_band = valid_x_range(m, d, A)
    rows = []
    for x in x_grid:
        env = thm11_envelope(x, m, d, A)
        band, be = thm12_band(x, m, d, A)
        rows.append({
            "x": x,
            "normal_tail": normal_tail(x),
            "envelope_lower": env.lower,
            "envelope_upper": env.upper,
            "relative_band": band,
            "be_bound": be,
            "in_range_sum": env.in_range,
            "in_range_band": bool(x <= x_max_band),
        })
    report = {
        "command": "envelope",
        "population": label,
        "N": pop.N,
        "n": n,
        "A": A,
        "beta3N": m.beta3N,
        "omega_N": d.omega_N,
        "x_max_sum": x_max_sum,
        "x_max_band": x_max_band,
        "rows": rows,
    }
    return report, _ENVELOPE_COLUMNS, EXIT_OK


_VALIDATE_COLUMNS = ["name", "passed", "margin", "error", "detail"]


def cmd_validate(ns, cfg) -> tuple[dict, list[str] | None, int]:
    level = _merged(ns, cfg, "level", "quick")
    if level not in ("quick", "full"):
        raise CliError("--level must be quick or full")
    seed = int(_merged(ns, cfg, "seed", 101))
    report = _validate.run(level, seed=seed)
    report["command"] = "validate"
    report["rows"] = report.pop("checks")
    if report["any_error"]:
        status = EXIT_NUMERIC
    elif not report["passed"]:
        status = EXIT_PROPERTY
    else:
        status = EXIT_OK
    return report, _VALIDATE_COLUMNS, status


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(sp):
    sp.add_argument("--population", help="power:<N>:<alpha> or file:<path>")
    sp.add_argument("--n", type=int, help="sample size")
    sp.add_argument("--x", action="append", help="threshold (repeatable or comma list)")
    sp.add_argument("--reps", type=int, help="Monte Carlo replications")
    sp.add_argument("--seed", type=int, help="base seed (row i uses seed + 1000003*i)")
    sp.add_argument("--workers", type=int, help="parallel blocks (deterministic per worker count)")
    sp.add_argument("--A", type=float, help="envelope constant")
    sp.add_argument("--xi", type=float, help="quadratic-term weight")
    sp.add_argument("--xi1", type=float, help="quartic-term weight")
    sp.add_argument("--h", type=float, help="threshold offset for the quadratic event")
    sp.add_argument("--config", help="JSON config file; explicit flags override its keys")
    sp.add_argument("--format", choices=("json", "csv", "text"), default=None, help="output format")
    sp.add_argument("--out", help="write the report to this path instead of stdout")


def _build_parser() -> _Parser:
    p = _Parser(prog="finpop", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("moments", "tail", "t-tail", "quadratic", "table1", "table2", "envelope", "validate"):
        sp = sub.add_parser(name)
        _add_common(sp)
        if name == "tail":
            sp.add_argument("--statistic", choices=("sum", "t", "quadratic"), default="sum")
        if name == "validate":
            sp.add_argument("--level", choices=("quick", "full"), default=None)
    return p


def main(argv=None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
        cfg = _load_config(getattr(ns, "config", None))
        fmt = _merged(ns, cfg, "format", "text")
        if fmt not in ("json", "csv", "text"):
            raise CliError(f"unknown format {fmt!r}")
        out = _merged(ns, cfg, "out")

        cmd = ns.command
        if cmd == "moments":
            result = cmd_moments(ns, cfg)
        elif cmd == "tail":
            result = cmd_tail(ns, cfg, ns.statistic)
        elif cmd == "t-tail":
            result = cmd_tail(ns, cfg, "t")
        elif cmd == "quadratic":
            result = cmd_tail(ns, cfg, "quadratic")
        elif cmd == "table1":
            result = cmd_table1(ns, cfg)
        elif cmd == "table2":
            result = cmd_table2(ns, cfg)
        elif cmd == "envelope":
            result = cmd_envelope(ns, cfg)
        else:
            result = cmd_validate(ns, cfg)
    except CliError as exc:
        print(f"finpop: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"finpop: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    report, columns, status = result
    try:
        _emit(report, fmt, out, columns)
    except OSError as exc:
        print(f"finpop: error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return status


if __name__ == "__main__":
    sys.exit(main())
