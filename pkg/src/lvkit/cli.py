"""Command-line driver.

Verification sweeps stream newline-delimited JSON reports, one case per
line, followed by a summary line with counts; --summary keeps only the
summary.  Case order in the output is by case index regardless of worker
scheduling, so identical inputs give identical reports up to elapsed_ms.

Exit codes: 0 all checks pass, 1 mathematical mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from fractions import Fraction

from .local_factors import (
    IsobaricShape,
    PlaceConfigF,
    InducedDatum,
    lemma32_cases,
    prop34_cases,
    verify_lemma32,
    verify_prop34,
)
from . import gaussnum, periods, weights

# documented sweep limits; --force lifts them
MAX_N_LEMMA32 = 5
MAX_N_PROP34 = 6
MAX_N_DERIVE = 8
MAX_D_DERIVE = 3
SHIFT_RANGE = (-2, 3)


@dataclass
class RunConfig:
    command: str
    max_n: int = 0
    out: str | None = None
    jobs: int = 0
    summary: bool = False
    force: bool = False
    input_path: str | None = None
    tol: float | None = None


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# sweep plumbing

def _lemma32_case(args):
    parts, kind = args
    rep = verify_lemma32(IsobaricShape(tuple(parts)), PlaceConfigF(kind))
    return rep.to_dict()


def _prop34_case(args):
    m, l, act = args
    rep = verify_prop34(InducedDatum(m, l, act))
    return rep.to_dict()


def _run_cases(cases, worker, jobs):
    if jobs <= 1 or len(cases) <= 1:
        return [worker(c) for c in cases]
    out = [None] * len(cases)
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        futures = {ex.submit(worker, c): i for i, c in enumerate(cases)}
        for fut in as_completed(futures):
            out[futures[fut]] = fut.result()
    return out


def _emit(lines, cfg):
    text = "\n".join(json.dumps(obj, sort_keys=True) for obj in lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sweep(cfg, reports):
    failed = sum(1 for r in reports if not r.get("equal", False))
    summary = {
        "command": cfg.command,
        "cases": len(reports),
        "passed": len(reports) - failed,
        "failed": failed,
        "ok": failed == 0,
    }
    _emit([summary] if cfg.summary else reports + [summary], cfg)
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------
# subcommands

def cmd_verify_lemma32(cfg):
    if cfg.max_n < 2:
        raise UsageError("--max-n must be at least 2")
    if cfg.max_n > MAX_N_LEMMA32 and not cfg.force:
        raise UsageError("--max-n above %d needs --force" % MAX_N_LEMMA32)
    cases = [(s.parts, c.kind) for s, c in lemma32_cases(cfg.max_n)]
    return _sweep(cfg, _run_cases(cases, _lemma32_case, cfg.jobs))


def cmd_verify_prop34(cfg):
    if cfg.max_n < 2:
        raise UsageError("--max-n must be at least 2")
    if cfg.max_n > MAX_N_PROP34 and not cfg.force:
        raise UsageError("--max-n above %d needs --force" % MAX_N_PROP34)
    cases = [(d.m, d.l, d.c_action) for d in prop34_cases(cfg.max_n)]
    return _sweep(cfg, _run_cases(cases, _prop34_case, cfg.jobs))


def _critset_json(cs):
    out = {"kind": cs.kind}
    if cs.is_empty_signal():
        out["points"] = []
        out["empty_reason"] = cs.empty_reason
        return out
    if cs.lo2 is None or cs.hi2 is None:
        out["unbounded"] = True
        if cs.parity is not None:
            out["parity"] = cs.parity
        return out
    out["points"] = [str(x) for x in cs.enumerate()]
    return out


def _parse_weight(obj, what):
    try:
        return weights.parse_weight_json(obj)
    except ValueError as exc:
        raise UsageError("%s: %s" % (what, exc)) from exc


def cmd_crit(cfg):
    try:
        with open(cfg.input_path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise UsageError(
            "parse error at line %d column %d: %s" % (exc.lineno, exc.colno, exc.msg)
        ) from exc
    if not isinstance(obj, dict):
        raise UsageError("input must be a JSON object")

    def asai_block(w):
        it = weights.infinity_type(w, 0)
        return {
            "same_sign": _critset_json(weights.crit_asai(it, 1)),
            "opposite_sign": _critset_json(weights.crit_asai(it, -1)),
        }

    if "pi" in obj or "pi_prime" in obj:
        if "pi" not in obj or "pi_prime" not in obj:
            raise UsageError("pair input needs both pi and pi_prime")
        w, r = _parse_weight(obj["pi"], "pi")
        wp, s = _parse_weight(obj["pi_prime"], "pi_prime")
        try:
            a = weights.infinity_type(w, r)
            b = weights.infinity_type(wp, s)
            result = {
                "piano": weights.piano_check(w, wp),
                "sufficiently_regular": {
                    "pi": weights.sufficiently_regular(w),
                    "pi_prime": weights.sufficiently_regular(wp),
                },
                "no_middle_class": weights.no_middle_class(a, b, r, s),
                "crit_rankin_selberg": _critset_json(
                    weights.crit_rankin_selberg(a, b, r, s)
                ),
                "crit_asai": {"pi": asai_block(w), "pi_prime": asai_block(wp)},
            }
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        w, _ = _parse_weight(obj, "weight")
        try:
            result = {
                "sufficiently_regular": weights.sufficiently_regular(w),
                "crit_asai": asai_block(w),
            }
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    _emit([result], cfg)
    return 0


_CLOSED_FORMS = {
    "asai-induced": lambda n, d, m, l: d * n * (n + 1) // 2,
    "rs-induced": lambda n, d, m, l: (2 * m + 1) * d * n * (n - 1) // 2,
    "arch-asai": lambda n, d, m, l: d * n,
    "arch-rs": lambda n, d, m, l: m * d * n * (n - 1) - d * (n - 1) * (n - 2) // 2,
    "ThmA": lambda n, d, m, l: m * d * n * (n - 1) - d * (n - 1) * (n - 2) // 2,
    "ThmB": lambda n, d, m, l: d * n,
    "ThmC": lambda n, d, m, l: m * d * n * (n - 1) - d * n * (n + 1) // 2,
    "ThmE": lambda n, d, m, l: d * (m - l) * n * (n - 1),
    "Delta": lambda n, d, m, l: d * n * (n + 1) // 2,
}


def cmd_derive(cfg, goal, n, d, m, l):
    if goal not in _CLOSED_FORMS:
        raise UsageError("unknown goal %r" % goal)
    min_n = 1 if goal == "Delta" else 2
    if n < min_n or d < 1:
        raise UsageError("parameters out of range for %s" % goal)
    if not cfg.force:
        if n > MAX_N_DERIVE:
            raise UsageError("--n above %d needs --force" % MAX_N_DERIVE)
        if d > MAX_D_DERIVE:
            raise UsageError("--d above %d needs --force" % MAX_D_DERIVE)
        lo, hi = SHIFT_RANGE
        if not (lo <= m <= hi and lo <= l <= hi):
            raise UsageError("shifts outside %d..%d need --force" % (lo, hi))

    if goal == "asai-induced":
        exp, _, trace = periods.derive_asai_induced(n, d)
    elif goal == "rs-induced":
        exp, _, trace = periods.derive_rs_induced(n, m, d)
    elif goal == "arch-asai":
        exp, trace = periods.derive_arch_asai(n, d, detail=True)
    elif goal == "arch-rs":
        exp, trace = periods.derive_arch_rs(n, m, d, detail=True)
    else:
        exp, trace = periods.derive_main_theorems(goal, n, d, m, l)

    closed = _CLOSED_FORMS[goal](n, d, m, l)
    obj = trace.to_dict()
    obj["closed_form"] = closed
    obj["match"] = exp == closed
    _emit([obj], cfg)
    return 0 if obj["match"] else 1


def cmd_gauss(cfg, mode, disc, h, w):
    tol_args = {} if cfg.tol is None else {"tol": cfg.tol}
    if mode == "quadratic":
        if disc is None:
            raise UsageError("quadratic mode needs --disc")
        try:
            rep = gaussnum.verify_quadratic_gauss(disc, **tol_args)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    elif mode == "classnumber":
        if disc is None or h is None or w is None:
            raise UsageError("classnumber mode needs --disc, --h and --w")
        try:
            rep = gaussnum.class_number_check(disc, h, w, **tol_args)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        raise UsageError("unknown mode %r" % mode)
    _emit([rep], cfg)
    return 0 if rep["equal"] else 1


# ---------------------------------------------------------------------------
# argument parsing

def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write reports to a file")
    common.add_argument(
        "--jobs", type=int, default=os.cpu_count() or 1, help="worker processes"
    )
    common.add_argument(
        "--summary", action="store_true", help="emit only the aggregated summary"
    )
    common.add_argument(
        "--force", action="store_true", help="lift the documented sweep bounds"
    )

    p = argparse.ArgumentParser(prog="lvkit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-lemma32", parents=[common])
    s.add_argument("--max-n", type=int, required=True)

    s = sub.add_parser("verify-prop34", parents=[common])
    s.add_argument("--max-n", type=int, required=True)

    s = sub.add_parser("crit", parents=[common])
    s.add_argument("input", help="weight JSON file")

    s = sub.add_parser("derive", parents=[common])
    s.add_argument("--goal", required=True, choices=sorted(_CLOSED_FORMS))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--l", type=int, default=0)

    s = sub.add_parser("gauss", parents=[common])
    s.add_argument("--mode", required=True, choices=["quadratic", "classnumber"])
    s.add_argument("--disc", type=int)
    s.add_argument("--h", type=int)
    s.add_argument("--w", type=int)
    s.add_argument("--tol", type=float)

    return p


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    cfg = RunConfig(
        command=args.command,
        max_n=getattr(args, "max_n", 0),
        out=args.out,
        jobs=args.jobs,
        summary=args.summary,
        force=args.force,
        input_path=getattr(args, "input", None),
        tol=getattr(args, "tol", None),
    )
    try:
        if args.command == "verify-lemma32":
            return cmd_verify_lemma32(cfg)
        if args.command == "verify-prop34":
            return cmd_verify_prop34(cfg)
        if args.command == "crit":
            return cmd_crit(cfg)
        if args.command == "derive":
            return cmd_derive(cfg, args.goal, args.n, args.d, args.m, args.l)
        if args.command == "gauss":
            return cmd_gauss(cfg, args.mode, args.disc, args.h, args.w)
        return 2
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (ValueError, periods.EngineError) as exc:
        # unexpected validation failure inside the libraries
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
