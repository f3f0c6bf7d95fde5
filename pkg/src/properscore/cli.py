"""Command line front end.

Subcommands: score, expected, properize, probe, entropy.  Exit codes are
0 on success, 1 on input or domain errors and 2 when ``--strict-finite`` is
set and some score diverged.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import dist as dmod
from . import weights as wmod
from .dist import DiscreteDistribution, Distribution, DomainError
from .propriety import DistGrid, check_proper, find_violation
from .quad import IntegralResult, IntegrationError, QuadConfig, mc_expect
from .rules import RuleSpec, entropy_s_tilde, expected_score, p_tilde_star, properize_map_bg, shannon_entropy


class InputError(Exception):
    pass


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _num(x: float) -> float | None:
    return float(x) if math.isfinite(x) else None


def _load_json(text: str, what: str) -> Any:
    """Parse ``text`` as inline JSON, or as the path of a JSON file."""
    src = text
    stripped = text.lstrip()
    if not stripped.startswith(("{", "[")):
        path = Path(text)
        if not path.is_file():
            raise InputError(f"{what}: {text!r} is neither JSON nor an existing file")
        src = path.read_text()
    try:
        return json.loads(src)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON ({exc})") from exc


def _rule(args) -> RuleSpec:
    raw = args.rule
    if raw.lstrip().startswith("{"):
        obj = _load_json(raw, "--rule")
    else:
        obj = {"rule": raw}
    if args.alpha is not None:
        obj["alpha"] = args.alpha
    if args.weight is not None:
        obj["weight"] = _load_json(args.weight, "--weight")
    return RuleSpec.from_dict(obj)


def _config(args) -> QuadConfig:
    return QuadConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("PROPERSCORE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InputError(f"PROPERSCORE_THREADS must be an integer, got {env!r}") from exc
    return 1


def _dist(text: str, what: str) -> Distribution:
    return dmod.from_dict(_load_json(text, what))


def read_forecasts(path: str) -> list[Distribution]:
    out = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read forecasts: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            out.append(dmod.from_dict(json.loads(line)))
        except (json.JSONDecodeError, DomainError) as exc:
            raise InputError(f"{path} line {lineno}: {exc}") from exc
    if not out:
        raise InputError("no forecasts")
    return out


def read_observations(path: str) -> list[float]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read observations: {exc}") from exc
    out = []
    for rowno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not "".join(row).strip():
            continue
        cell = row[0].strip()
        try:
            val = float(cell)
        except ValueError:
            if rowno == 1 and not out:
                continue  # header
            raise InputError(f"{path} row {rowno}: not a number: {cell!r}") from None
        if not math.isfinite(val):
            raise InputError(f"{path} row {rowno}: observation must be finite")
        out.append(val)
    if not out:
        raise InputError("no observations")
    return out


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _to_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in r])
    return buf.getvalue()


def _result_fields(r: IntegralResult) -> dict[str, Any]:
    return {
        "value": _num(r.value),
        "error_estimate": _num(r.error_estimate),
        "converged": r.converged,
        "divergent": r.divergent,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_score(args) -> int:
    rule = _rule(args)
    cfg = _config(args)
    forecasts = read_forecasts(args.forecasts)
    obs = read_observations(args.observations)
    pairing = args.pairing or ("broadcast" if len(forecasts) == 1 else "zip")
    if pairing == "broadcast":
        if len(forecasts) != 1:
            raise InputError(f"broadcast pairing needs exactly one forecast, got {len(forecasts)}")
        pairs = [(forecasts[0], y) for y in obs]
    else:
        if len(forecasts) != len(obs):
            raise InputError(f"zip pairing needs as many forecasts ({len(forecasts)}) as observations ({len(obs)})")
        pairs = list(zip(forecasts, obs))
    for i, (F, _) in enumerate(pairs):
        try:
            rule.check_forecast(F)
        except DomainError as exc:
            raise InputError(f"forecast {i + 1}: {exc}") from exc

    def one(pair):
        return rule.score(pair[0], pair[1], cfg)

    threads = _threads(args)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(one, pairs))
    else:
        results = [one(p) for p in pairs]

    finite = [r.value for r in results if r.finite]
    n_div = sum(r.divergent for r in results)
    summary = {
        "count": len(results),
        "finite_count": len(finite),
        "divergent_count": n_div,
        "mean_score": _num(float(np.mean(finite))) if finite else None,
    }
    if args.format == "json":
        rows = [
            {"index": i, "observation": y, "score": _num(r.value), "error_estimate": _num(r.error_estimate),
             "converged": r.converged, "divergent": r.divergent}
            for i, ((_, y), r) in enumerate(zip(pairs, results))
        ]
        report = {"rule": rule.to_dict(), "pairing": pairing, "config": asdict(cfg), "rows": rows,
                  "summary": summary}
        _write(_to_json(report), args.out)
    else:
        rows = [(i, y, r.value, r.error_estimate, r.converged, r.divergent)
                for i, ((_, y), r) in enumerate(zip(pairs, results))]
        _write(_to_csv(["index", "observation", "score", "error_estimate", "converged", "divergent"], rows),
               args.out)
    if args.strict_finite and n_div:
        print(f"error: {n_div} score(s) diverged", file=sys.stderr)
        return 2
    return 0


def cmd_expected(args) -> int:
    rule = _rule(args)
    cfg = _config(args)
    F = _dist(args.forecast, "--forecast")
    G = _dist(args.verifier, "--verifier")
    res = expected_score(rule, F, G, cfg, method=args.method)
    out: dict[str, Any] = {"rule": rule.to_dict(), "forecast": F.to_dict(), "verifier": G.to_dict(),
                           "method": args.method, **_result_fields(res)}
    if args.mc_n:
        mean, se = mc_expect(G, lambda ys: np.array([rule.score(F, float(y), cfg).value for y in ys]),
                             args.mc_n, args.seed)
        out["monte_carlo"] = {"n": args.mc_n, "seed": args.seed, "mean": _num(mean), "standard_error": _num(se)}
    if args.format == "json":
        _write(_to_json(out), args.out)
    else:
        rows = [("value", res.value), ("error_estimate", res.error_estimate), ("converged", res.converged),
                ("divergent", res.divergent)]
        if "monte_carlo" in out:
            rows += [("mc_mean", mean), ("mc_standard_error", se)]
        _write(_to_csv(["field", "value"], rows), args.out)
    if args.strict_finite and res.divergent:
        return 2
    return 0


def _grid_points(spec: str) -> np.ndarray:
    try:
        if ":" in spec:
            lo, hi, n = spec.split(":")
            return np.linspace(float(lo), float(hi), int(n))
        return np.array([float(v) for v in spec.split(",") if v.strip()])
    except ValueError as exc:
        raise InputError(f"bad grid specification {spec!r}; use lo:hi:n or a comma list") from exc


def cmd_properize(args) -> int:
    P = _dist(args.dist, "--dist")
    xs = _grid_points(args.grid)
    if xs.size == 0:
        raise InputError("empty x grid")
    alpha = args.alpha
    cols = {"x": xs, "P": np.asarray(P.cdf(xs))}
    if args.map in ("tilde", "both"):
        if not P.in_p01:
            raise DomainError("distribution not in P_(0,1)")
        cols["P_tilde_star"] = np.asarray(p_tilde_star(P, alpha).cdf(xs))
    if args.map in ("bg", "both"):
        cols["P_star_bg"] = np.asarray(properize_map_bg(P, alpha).cdf(xs))
    names = list(cols)
    if args.format == "json":
        rows = [{k: float(cols[k][i]) for k in names} for i in range(xs.size)]
        _write(_to_json({"distribution": P.to_dict(), "alpha": alpha, "rows": rows}), args.out)
    else:
        _write(_to_csv(names, [[cols[k][i] for k in names] for i in range(xs.size)]), args.out)
    return 0


def cmd_probe(args) -> int:
    rule = _rule(args)
    cfg = _config(args)
    grid = DistGrid.from_dict(_load_json(args.grid, "--grid"))
    members = grid.distributions()
    report = check_proper(rule, grid, cfg, tolerance=args.tolerance, method=args.method, threads=_threads(args))
    if rule.name == "s_tilde":
        v = find_violation(rule, members[args.base], cfg)
        if v is not None:
            report.challenger = {
                "base_index": args.base,
                "margin": "inf" if math.isinf(v.margin) else v.margin,
                "truthful": _result_fields(v.truthful),
                "challenger": _result_fields(v.challenger_score),
            }
    if args.format == "json":
        _write(_to_json(report.to_dict()), args.out)
    else:
        n = len(members)
        rows = [[f"F{i}"] + [report.matrix[i, j] for j in range(n)] for i in range(n)]
        _write(_to_csv([""] + [f"G{j}" for j in range(n)], rows), args.out)
    return 0


def cmd_entropy(args) -> int:
    d = _dist(args.dist, "--dist")
    if isinstance(d, DiscreteDistribution) and args.weight is None:
        out = {"kind": "shannon", "distribution": d.to_dict(), "bits": shannon_entropy(d)}
        rows = [("bits", out["bits"])]
    else:
        w = wmod.from_dict(_load_json(args.weight, "--weight")) if args.weight else wmod.UNIT
        res = entropy_s_tilde(d, w, _config(args))
        out = {"kind": "s_tilde_star", "distribution": d.to_dict(), "weight": w.to_dict(), **_result_fields(res)}
        rows = [("value", res.value), ("error_estimate", res.error_estimate), ("converged", res.converged),
                ("divergent", res.divergent)]
    if args.format == "json":
        _write(_to_json(out), args.out)
    else:
        _write(_to_csv(["field", "value"], rows), args.out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="properscore", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rel-tol", type=float, default=QuadConfig.rel_tol)
    common.add_argument("--abs-tol", type=float, default=QuadConfig.abs_tol)
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $PROPERSCORE_THREADS or 1)")
    rule_opts = argparse.ArgumentParser(add_help=False)
    rule_opts.add_argument("--rule", required=True, help="rule name or RuleSpec JSON")
    rule_opts.add_argument("--alpha", type=float)
    rule_opts.add_argument("--weight", help="weight JSON or file")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", parents=[common, rule_opts], help="score forecasts against observations")
    p.add_argument("forecasts", help="JSONL file, one distribution per line")
    p.add_argument("observations", help="CSV file, one observation per row")
    p.add_argument("--pairing", choices=("zip", "broadcast"),
                   help="default: broadcast for a single forecast, zip otherwise")
    p.add_argument("--strict-finite", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("expected", parents=[common, rule_opts], help="expected score S(F, G)")
    p.add_argument("--forecast", required=True)
    p.add_argument("--verifier", required=True)
    p.add_argument("--method", choices=("direct", "reduced"), default="direct")
    p.add_argument("--mc-n", type=int, default=0, help="Monte Carlo cross-check sample size (0: off)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict-finite", action="store_true")
    p.set_defaults(func=cmd_expected)

    p = sub.add_parser("properize", parents=[common], help="tabulate the properization maps")
    p.add_argument("--dist", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--grid", default="-5:5:11", help="lo:hi:n or comma-separated x values")
    p.add_argument("--map", choices=("tilde", "bg", "both"), default="both")
    p.set_defaults(func=cmd_properize)

    p = sub.add_parser("probe", parents=[common, rule_opts], help="numerical propriety check on a grid")
    p.add_argument("--grid", required=True, help="grid JSON or file")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--method", choices=("direct", "reduced"), default="reduced")
    p.add_argument("--base", type=int, default=0, help="grid member used for the s_tilde challenger")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("entropy", parents=[common], help="expected properized score under truth-telling")
    p.add_argument("--dist", required=True)
    p.add_argument("--weight")
    p.set_defaults(func=cmd_entropy)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "alpha", None) is not None and not args.alpha > 0:
            raise DomainError("alpha must be positive")
        return args.func(args)
    except (InputError, DomainError, IntegrationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
