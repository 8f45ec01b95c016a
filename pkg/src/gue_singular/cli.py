"""Command-line entry point ``gue-singular``.

Every command writes an envelope ``{command, params, seed, version, payload}``.
JSON output carries it as one object. CSV output puts it, minus the payload, on
a leading ``#`` line followed by a header row and the data rows.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from . import decompose, densities, detlaws, extremes, verify
from .ensembles import EnsembleSpec, Family, make_rng, sample_gue_dense, sample_spectra

_FAMILIES = {
    "gue": Family.GUE,
    "goe": Family.GOE,
    "lue": Family.LUE,
    "antigue": Family.ANTIGUE,
    "ginibre": Family.GINIBRE,
    "gue-direct": Family.GUE_SINGULAR_DIRECT,
}


# ---------------------------------------------------------------------------
# serialization


def format_float(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    text = "%.17g" % x
    return text if any(c in text for c in ".en") else text + ".0"


def to_json(obj) -> str:
    """JSON text with floats at 17 significant digits; non-finite floats become strings."""
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format_float(x) if math.isfinite(x) else json.dumps(format_float(x))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    return str(v)


def emit_csv(meta: dict, header: list, rows) -> str:
    buf = io.StringIO()
    buf.write("# " + to_json(meta) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def parse_csv(text: str) -> tuple[dict, list, list]:
    """Inverse of :func:`emit_csv`: ``(meta, header, rows)``; numeric cells become int or float."""
    lines = text.split("\n")
    if not lines or not lines[0].startswith("# "):
        raise ValueError("missing metadata line")
    meta = json.loads(lines[0][2:])
    reader = csv.reader(io.StringIO("\n".join(lines[1:])))
    header = next(reader)
    rows = []
    for raw in reader:
        if not raw:
            continue
        rows.append([_parse_cell(c) for c in raw])
    return meta, header, rows


def _parse_cell(c: str):
    try:
        return int(c)
    except ValueError:
        pass
    try:
        return float(c)
    except ValueError:
        return c


def _envelope(args, params: dict, seed) -> dict:
    return {"command": args.command, "params": params, "seed": seed, "version": __version__}


def _write(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _output_table(args, params, seed, header, rows):
    env = _envelope(args, params, seed)
    if getattr(args, "format", "csv") == "json":
        env["payload"] = {"columns": header, "rows": [list(r) for r in rows]}
        _write(args, to_json(env) + "\n")
    else:
        _write(args, emit_csv(env, header, rows))


def _output_json(args, params, seed, payload):
    env = _envelope(args, params, seed)
    env["payload"] = payload
    _write(args, to_json(env) + "\n")


# ---------------------------------------------------------------------------
# commands


def _spec_from_args(args) -> EnsembleSpec:
    family = _FAMILIES[args.ensemble]
    if family is Family.LUE and args.a is None:
        raise ValueError("the lue ensemble needs --a (Laguerre parameter, a > -1)")
    if args.a is not None and family is not Family.LUE:
        raise ValueError("--a applies to the lue ensemble only")
    return EnsembleSpec(family, args.n, args.a)


def cmd_sample(args):
    kind = args.what.replace("-", "_")
    spec = _spec_from_args(args)
    values = sample_spectra(spec, make_rng(args.seed, 0), args.trials, kind)
    prefix = "sv" if kind == "singular_values" else "ev"
    header = [f"{prefix}{i + 1}" for i in range(values.shape[1])]
    params = {"ensemble": args.ensemble, "n": args.n, "a": args.a, "trials": args.trials, "what": args.what}
    _output_table(args, params, args.seed, header, values.tolist())


def cmd_unmix(args):
    n = args.n
    if n > decompose.UNMIX_CAP:
        raise ValueError(f"--n must be <= {decompose.UNMIX_CAP} for unmixing")
    values = np.sort(np.abs(sample_gue_dense(n, make_rng(args.seed, 0), args.trials)), axis=1)
    plus, minus = decompose.split_by_mask(values, decompose.unmix_batch(values, make_rng(args.seed, 1)))
    header = [f"plus{i + 1}" for i in range(plus.shape[1])] + [f"minus{i + 1}" for i in range(minus.shape[1])]
    rows = np.concatenate([plus, minus], axis=1).tolist()
    _output_table(args, {"n": n, "trials": args.trials}, args.seed, header, rows)


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:step`` to an inclusive grid."""
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise ValueError(f"grid must look like lo:hi:step, got {text!r}") from None
    if not step > 0 or hi < lo:
        raise ValueError(f"grid needs step > 0 and hi >= lo, got {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def cmd_density(args):
    n = args.n
    params = {"which": args.which, "n": n, "sign": args.sign, "grid": args.grid}
    if args.which == "semicircle-residual":
        grid = parse_grid(args.grid) if args.grid else np.linspace(0, 2 * math.sqrt(n), 2001)[1:]
        grid = grid[grid > 0]
        _output_json(args, params, None, {"residual": densities.semicircle_identity_residual(n, grid)})
        return
    if not args.grid:
        raise ValueError("--grid is required")
    x = parse_grid(args.grid)
    if args.which == "gue-level":
        y = densities.level_density_gue(n, x)
    elif args.which == "lue-level":
        if args.sign is None:
            raise ValueError("lue-level needs --sign + or -")
        y = densities.lue_half_singular_value_pdf(n, args.sign, x)
    else:
        y = densities.ginibre_magnitude_density(n, x)
    _output_table(args, params, None, ["x", "value"], [[float(a), float(b)] for a, b in zip(x, np.atleast_1d(y))])


def cmd_detmoments(args):
    params = {"ensemble": args.ensemble, "n": args.n, "k": args.k}
    if args.ensemble == "gue":
        m = detlaws.gue_det_moment(args.n, args.k)
        payload = {"value": str(m.value), "factors": [list(g) for g in m.groups], "branch": m.branch}
    elif args.ensemble == "goe-odd":
        if args.k % 2:
            raise ValueError("goe-odd needs an even power --k")
        u = args.k // 2
        payload = {"value": str(detlaws.goe_odd_det_moment(args.n, u)), "branch": "goe-odd"}
    else:
        payload = {"value": str(detlaws.ginibre_absdet_moment(args.n, args.k)), "branch": "ginibre-abs"}
    _output_json(args, params, None, payload)


def cmd_smin(args):
    r = extremes.smin_survival_detail(args.n, args.s)
    payload = {"survival": r.survival, "method": r.method, "factors": list(r.factors), "conditions": list(r.conditions)}
    _output_json(args, {"n": args.n, "s": args.s}, None, payload)


def cmd_count(args):
    spec = _spec_from_args(args)
    table = extremes.counting_mc(spec, (args.lo, args.hi), args.trials, args.seed)
    params = {"ensemble": args.ensemble, "n": args.n, "a": args.a, "lo": args.lo, "hi": args.hi, "trials": args.trials}
    rows = [[k, c, p, e] for (k, p, e), c in zip(table.rows(), table.counts)]
    _output_table(args, params, args.seed, ["k", "count", "prob", "stderr"], rows)


def cmd_verify(args):
    results = verify.run_suite(args.suite, args.seed)
    for r in results:
        print(r.line(), file=sys.stderr)
    payload = {
        "suite": args.suite,
        "all_passed": all(r.passed for r in results),
        "criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail} for r in results],
    }
    _output_json(args, {"suite": args.suite}, args.seed, payload)
    return 0 if payload["all_passed"] else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gue-singular", description="GUE singular-value laboratory")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="sample spectra")
    s.add_argument("--ensemble", required=True, choices=sorted(_FAMILIES))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--a", type=float)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--what", choices=["eigenvalues", "singular-values"], default="singular-values")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("unmix", help="sample GUE singular values and split them into plus/minus parts")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_unmix)

    s = sub.add_parser("density", help="tabulate a density")
    s.add_argument("--which", required=True, choices=["gue-level", "lue-level", "ginibre-radial", "semicircle-residual"])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--sign", choices=["+", "-"])
    s.add_argument("--grid", help="lo:hi:step")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("detmoments", help="exact determinant moments")
    s.add_argument("--ensemble", required=True, choices=["gue", "goe-odd", "ginibre"])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_detmoments)

    s = sub.add_parser("smin", help="survival function of the smallest GUE singular value")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--s", type=float, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_smin)

    s = sub.add_parser("count", help="Monte Carlo singular-value counting table")
    s.add_argument("--ensemble", choices=sorted(_FAMILIES), default="gue")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--a", type=float)
    s.add_argument("--lo", type=float, required=True)
    s.add_argument("--hi", type=float, required=True)
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("verify", help="run the acceptance suite")
    s.add_argument("--suite", choices=["fast", "full"], default="fast")
    s.add_argument("--seed", type=int, default=20240601)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)
    return p


def _join_grid(argv: list) -> list:
    # argparse reads a value like "-6:6:0.01" as an option, so attach it to its flag
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--grid" and i + 1 < len(argv):
            out.append("--grid=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_grid(list(sys.argv[1:] if argv is None else argv)))
    if getattr(args, "trials", 1) is not None and getattr(args, "trials", 1) < 1:
        parser.error("--trials must be >= 1")
    try:
        code = args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
