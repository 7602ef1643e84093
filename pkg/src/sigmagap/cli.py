"""Command-line front end: closed-form queries, sigma tables and verification campaigns.

Exit codes: 0 all checks pass, 1 at least one ledger record fails, 2 usage or
domain error (including an unwritable output path).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, campaigns, closed_forms as cf
from .algebra import FieldTag
from .atlas import ProductSphereSpec, ProjectiveSpec
from .errors import DomainError
from .ledger import DiscrepancyLedger

LEDGER_HEADER = ["name", "params", "lhs", "rhs", "relation", "margin", "pass"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------- serialization


def _plain(x):
    """Convert numpy values and containers into JSON-ready Python objects."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if x is None or isinstance(x, str):
        return x
    if callable(x):
        return None
    return str(x)


def _format_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    text = "%.17g" % v
    # keep the value a float on parse ("4" would round-trip as an integer)
    return text if any(c in text for c in ".en") else text + ".0"


def _encode(o, indent, level):
    """json.dumps equivalent that renders floats with 17 significant digits."""
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if isinstance(o, dict):
        if not o:
            yield "{}"
            return
        yield "{"
        for i, (k, v) in enumerate(o.items()):
            yield (sep if i else "") + pad + json.dumps(k) + ": "
            yield from _encode(v, indent, level + 1)
        yield end + "}"
    elif isinstance(o, list):
        if not o:
            yield "[]"
            return
        yield "["
        for i, v in enumerate(o):
            yield (sep if i else "") + pad
            yield from _encode(v, indent, level + 1)
        yield end + "]"
    elif isinstance(o, bool) or o is None:
        yield json.dumps(o)
    elif isinstance(o, float):
        yield _format_float(o)
    else:
        yield json.dumps(o)


def to_json(obj) -> str:
    return "".join(_encode(_plain(obj), 2, 0)) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_format_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _compact(d) -> str:
    return json.dumps(_plain(d), sort_keys=False, separators=(",", ":"))


def ledger_csv(ledger: DiscrepancyLedger) -> str:
    rows = [
        [r.name, _compact(r.params), r.lhs, r.rhs, r.relation, r.margin, "true" if r.passed else "false"]
        for r in ledger.records
    ]
    return _csv_text(LEDGER_HEADER, rows)


def payload_csv(payload) -> str:
    if isinstance(payload, DiscrepancyLedger):
        return ledger_csv(payload)
    if isinstance(payload, list):  # sigma table
        rows = [
            [rep.params["manifold"], _compact(rep.params), float(rep["sigma"]), rep["source"]]
            for rep in payload
        ]
        return _csv_text(["manifold", "params", "sigma", "source"], rows)
    rows = [[k, v if not isinstance(v, (list, dict)) else _compact(v)] for k, v in _plain(payload.values).items()]
    return _csv_text(["key", "value"], rows)


def envelope(command: list[str], seed, status: str, payload, timestamp: bool = True) -> dict:
    if isinstance(payload, DiscrepancyLedger):
        body = payload.as_dict()
    elif isinstance(payload, list):
        body = {"table": [rep.as_dict() for rep in payload]}
    elif payload is None:
        body = None
    else:
        body = payload.as_dict()
    return {
        "tool_version": __version__,
        "command": list(command),
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat() if timestamp else None,
        "status": status,
        "payload": body,
    }


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sigmagap", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def output_flags(sp):
        fmt = sp.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="format", action="store_const", const="json")
        fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
        sp.set_defaults(format="json")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--no-timestamp", action="store_true", help="omit the timestamp (byte-stable output)")

    cf_p = sub.add_parser("closed-form", help="closed-form catalog entries")
    cf_sub = cf_p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    prod = cf_sub.add_parser("product", help="S^k(r1) x S^{n-k}(r2) in S^{n+1}")
    prod.add_argument("--n", type=int, required=True)
    prod.add_argument("--k", type=int, required=True)
    prod.add_argument("--r1", type=float, help="default: the minimal radius sqrt(k/n)")
    output_flags(prod)
    proj = cf_sub.add_parser("projective", help="embedded projective space P^n(F)")
    proj.add_argument("--field", required=True, choices=["R", "C", "H"])
    proj.add_argument("--dim", type=int, required=True, help="n in P^n(F)")
    output_flags(proj)

    sig = sub.add_parser("sigma-table", help="sigma invariants of products and projective spaces")
    sig.add_argument("--max-n", type=int, default=8)
    output_flags(sig)

    ver = sub.add_parser("verify", help="run a verification campaign")
    ver.add_argument("campaign", choices=["minimality", "match", "identities", "inequalities", "fk"])
    ver.add_argument("--field", choices=["R", "C", "H"])
    ver.add_argument("--dim", type=int)
    ver.add_argument("--product", action="store_true", help="target a product of spheres")
    ver.add_argument("--n", type=int)
    ver.add_argument("--k", type=int)
    ver.add_argument("--r1", type=float)
    ver.add_argument("--samples", type=int, default=100)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--workers", type=int, default=1)
    ver.add_argument(
        "--tol",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="override a tolerance (e.g. H=1e-9); a bare number overrides the campaign's main tolerance",
    )
    ver.add_argument("--max-n", type=int, default=60, help="inequalities: largest n")
    ver.add_argument("--grid", type=int, default=10_000, help="fk: grid size")
    output_flags(ver)
    return p


MAIN_TOL = {"minimality": "H", "match": "match", "identities": "norm_identity", "fk": "fk_minimizer"}


def _tolerances(args) -> dict:
    out = {}
    for item in args.tol:
        name, sep, value = item.partition("=")
        if not sep:
            name, value = MAIN_TOL.get(args.campaign, "H"), item
        if name not in campaigns.DEFAULT_TOLERANCES:
            raise UsageError(f"unknown tolerance {name!r}")
        try:
            out[name] = float(value)
        except ValueError:
            raise UsageError(f"tolerance {item!r} is not a number") from None
    return out


def _target(args):
    if args.product:
        if args.n is None or args.k is None:
            raise UsageError("--product needs --n and --k")
        if args.r1 is None:
            return ProductSphereSpec.minimal(args.n, args.k)
        return ProductSphereSpec(args.n, args.k, args.r1)
    if args.field is not None:
        if args.dim is None:
            raise UsageError("--field needs --dim")
        return ProjectiveSpec(FieldTag.parse(args.field), args.dim)
    return None


def _run_verify(args):
    cfg = campaigns.CampaignConfig(
        target=_target(args),
        samples=args.samples,
        seed=args.seed,
        tolerances=_tolerances(args),
        workers=args.workers,
    )
    if args.campaign in ("minimality", "match") and cfg.target is None:
        raise UsageError(f"verify {args.campaign} needs --field/--dim or --product")
    if args.campaign == "minimality":
        return campaigns.campaign_minimality(cfg)
    if args.campaign == "match":
        return campaigns.campaign_closed_form_match(cfg)
    if args.campaign == "identities":
        return campaigns.campaign_algebraic_identities(cfg)
    if args.campaign == "inequalities":
        return campaigns.campaign_inequalities(args.max_n, cfg)
    if args.n is None or args.k is None:
        raise UsageError("verify fk needs --n and --k")
    return campaigns.campaign_fk(args.n, args.k, args.grid, cfg)


def _execute(args):
    if args.command == "closed-form":
        if args.kind == "product":
            spec = (
                ProductSphereSpec.minimal(args.n, args.k)
                if args.r1 is None
                else ProductSphereSpec(args.n, args.k, args.r1)
            )
            return cf.product_geometry(spec), None
        return cf.projective_closed_forms(args.field, args.dim), None
    if args.command == "sigma-table":
        if args.max_n < 3:
            raise DomainError("--max-n must be >= 3")
        return cf.sigma_table(args.max_n), None
    return _run_verify(args), args.seed


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        payload, seed = _execute(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (DomainError, ValueError) as exc:
        print(f"sigmagap: error: {exc}", file=sys.stderr)
        return 2

    failed = isinstance(payload, DiscrepancyLedger) and not payload.passed
    status = "violation" if failed else "ok"
    if args.format == "csv":
        text = payload_csv(payload)
    else:
        text = to_json(envelope(argv, seed, status, payload, timestamp=not args.no_timestamp))
    try:
        _write(text, args.out)
    except OSError as exc:
        print(f"sigmagap: error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 2
    if failed:
        summary = payload.summary
        print(
            f"sigmagap: {summary['fail_count']} record(s) failed; worst {summary['worst_case_id']} "
            f"margin {summary['worst_margin']:.3e}",
            file=sys.stderr,
        )
    return 1 if failed else 0


def main() -> None:
    sys.exit(run())
