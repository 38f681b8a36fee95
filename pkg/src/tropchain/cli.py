"""Command-line front end.  Every command prints one JSON report.

Exit status is 0 when the report has no failures, 1 when it does and 2
when the input is rejected.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .abel import representing_divisor
from .brill_noether import bn_rank, gonality_upper, is_hyperelliptic, martens_classify
from .chain_model import (
    TorsionProfile,
    chain_from_json,
    chain_to_json,
    divisor_from_json,
    divisor_to_json,
    normalize_divisor,
    position_to_json,
    profile_of,
)
from .errors import ChainError, MalformedInput
from .rank import complete_to_rank, divisor_rank, satisfies_tableau
from .tableaux import DisplacementTableau, enumerate_tableaux, torus_of, validate_tableau, wrd_dim
from .verification import profile_family, sweep, verify_profile


def _load(path: str | None) -> tuple[dict, str]:
    raw = sys.stdin.read() if path in (None, "-") else Path(path).read_text()
    digest = hashlib.sha256(raw.encode()).hexdigest()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}", path="$") from None
    if not isinstance(doc, dict):
        raise MalformedInput("input must be a JSON object", path="$")
    return doc, digest


def _profile(space) -> TorsionProfile:
    return space if isinstance(space, TorsionProfile) else profile_of(space)


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise MalformedInput(f"--{name} is required for '{args.command}'")


def _divisor(doc, space, key="divisor"):
    if key not in doc:
        raise MalformedInput(f"input needs a '{key}' list", path="$")
    return normalize_divisor(space, divisor_from_json(doc[key], f"$.{key}"))


def cmd_analyze(doc, args):
    profile = _profile(chain_from_json(doc))
    out = {"profile": chain_to_json(profile), "hyperelliptic": is_hyperelliptic(profile)}
    if profile.genus >= 3:
        out["martens"] = martens_classify(profile).to_json()
    gon = gonality_upper(profile)
    out["gonality_upper"] = gon.value
    out["gonality_witness"] = gon.to_json()
    return out, []


def cmd_rank(doc, args):
    space = chain_from_json(doc)
    D = _divisor(doc, space)
    cert = divisor_rank(space, D)
    rep = representing_divisor(space, D)
    out = cert.to_json()
    out["representing_divisor"] = {
        "positions": [position_to_json(p) for p in rep.positions],
        "tail_at_w_g": rep.tail,
    }
    return out, []


def cmd_wrd_dim(doc, args):
    _need(args, "d", "r")
    space = chain_from_json(doc)
    return {"d": args.d, "r": args.r, "dimension": wrd_dim(space, args.d, args.r)}, []


def cmd_bn_rank(doc, args):
    _need(args, "d", "r")
    profile = _profile(chain_from_json(doc))
    cert = bn_rank(profile, args.d, args.r, exhaustive=args.exhaustive)
    return cert.to_json(with_witnesses=args.witnesses), []


def cmd_complete(doc, args):
    _need(args, "d", "r")
    space = chain_from_json(doc)
    E = _divisor(doc, space)
    done = complete_to_rank(space, E, args.d, args.r)
    if done is None:
        return {"d": args.d, "r": args.r, "completion": None}, []
    total = E + done.F
    return {
        "d": args.d,
        "r": args.r,
        "completion": {
            "F": divisor_to_json(done.F),
            "divisor": divisor_to_json(total),
            "tableau": done.tableau.to_json(),
            "hosts": list(done.hosts),
            "rank": divisor_rank(space, total).rank,
        },
    }, []


def cmd_tableaux(doc, args):
    space = chain_from_json(doc)
    g = space.genus
    if "tableau" in doc:
        t = DisplacementTableau.from_json(doc["tableau"], "$.tableau")
        check = validate_tableau(space, t)
        out = {"valid": check.valid}
        failures = []
        if not check.valid:
            out["violation"] = {"cells": [list(c) for c in check.violation], "reason": check.reason}
            failures.append({"check": "tableau", "reason": check.reason})
        else:
            torus = torus_of(t, g)
            out["free_cycles"] = list(torus.free)
            out["dimension"] = torus.dimension
        if "divisor" in doc:
            D = _divisor(doc, space)
            out["divisor_in_torus"] = check.valid and satisfies_tableau(representing_divisor(space, D), t, space)
        return out, failures
    _need(args, "d", "r")
    found = []
    total = 0
    for t in enumerate_tableaux(space, args.d, args.r):
        total += 1
        if len(found) < args.limit:
            found.append({"tableau": t.to_json(), "free_cycles": list(torus_of(t, g).free)})
    return {"d": args.d, "r": args.r, "count": total, "shown": found}, []


def cmd_verify(doc, args):
    profile = _profile(chain_from_json(doc))
    report = verify_profile(profile, args.seed)
    failures = [{"check": c.name, "detail": c.detail} for c in report.checks if not c.passed]
    return report.to_json(), failures


def cmd_sweep(doc, args):
    torsions = tuple(int(t) for t in args.torsions.split(","))
    family = list(profile_family(args.max_genus, torsions, args.max_special, args.min_genus))
    reports = sweep(family, args.seed, args.jobs)
    failures = [
        {"torsion_profile": rep["torsion_profile"], "genus": rep["genus"], "check": c["name"]}
        for rep in reports
        for c in rep["checks"]
        if not c["passed"]
    ]
    manifest = {
        "family": {
            "min_genus": args.min_genus,
            "max_genus": args.max_genus,
            "torsions": list(torsions),
            "max_non_two": args.max_special,
            "profiles": len(family),
        },
        "seed": args.seed,
        "reports": reports,
    }
    return manifest, failures


COMMANDS = {
    "analyze": cmd_analyze,
    "rank": cmd_rank,
    "wrd-dim": cmd_wrd_dim,
    "bn-rank": cmd_bn_rank,
    "complete": cmd_complete,
    "tableaux": cmd_tableaux,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tropchain", description="Divisors and Brill-Noether ranks on chains of cycles.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", help="JSON document, '-' for stdin")
        p.add_argument("--d", type=int)
        p.add_argument("--r", type=int)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=["json"], default="json")
        if name == "bn-rank":
            p.add_argument("--exhaustive", action="store_true", help="also check every integer-tagged stratum")
            p.add_argument("--witnesses", action="store_true", help="embed one completion per stratum")
        if name == "tableaux":
            p.add_argument("--limit", type=int, default=20, help="tableaux listed in the report")
        if name == "sweep":
            p.add_argument("--min-genus", type=int, default=2)
            p.add_argument("--max-genus", type=int, default=8)
            p.add_argument("--torsions", default="0,2,3,4,5")
            p.add_argument("--max-special", type=int, default=2, help="interior torsions other than 2")
    return parser


def run(argv: list[str] | None = None) -> tuple[int, dict]:
    return execute(build_parser().parse_args(argv))


def execute(args: argparse.Namespace) -> tuple[int, dict]:
    report = {"tool": "tropchain", "version": __version__, "command": args.command}
    try:
        if args.command == "sweep" and args.input is None:
            doc, digest = {}, hashlib.sha256(b"").hexdigest()
        else:
            doc, digest = _load(args.input)
        report["input_sha256"] = digest
        result, failures = COMMANDS[args.command](doc, args)
    except ChainError as exc:
        report["error"] = exc.to_json()
        return 2, report
    report["result"] = result
    report["failures"] = failures
    return (1 if failures else 0), report


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    status, report = execute(args)
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
