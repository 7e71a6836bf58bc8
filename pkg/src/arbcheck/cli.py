"""Command-line surface: check, hedge, report.

`check` runs the full battery on a model file and emits a JSON report whose
certificates are self-contained (exact rationals as "p/q" strings, strategy
tables, kernel vectors, gaps).  `hedge` decides super-replicability of a
named claim; `report` renders the dual-side projection report for named
market kinds.  Exit codes: 0 when every requested check ran (whatever the
verdicts), 2 on parse errors, 3 on internal invariant violations.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import lp as lp_module
from .cones import (
    check_ef,
    check_nar,
    check_nas_direct,
    check_naw,
    find_cps,
    superhedge_membership,
)
from .errors import (
    ArbcheckError,
    InternalInvariantViolation,
    NoKernel,
    ParseError,
    SizeGuardExceeded,
    UnknownClaim,
    UnknownKind,
)
from .guard import DEFAULT_GUARD, Budget
from .modelfile import Model, encode_exact, load_model
from .rationals import rat_str
from .reports import ProjectionReport, report_currency1, report_currency2, report_security
from .trademap import Strategy, check_hn0_structural, validate_axioms

ALL_CHECKS = ("axioms", "hn0", "naw", "cps", "ef", "nas", "nar")


def _strategy_table(strat: Strategy):
    return [
        [encode_exact([list(row) for row in mat]) for mat in per_atom]
        for per_atom in strat.entries
    ]


def _random_vector_table(rv):
    return encode_exact([list(v) for v in rv.values])


def _kernel_payload(kernel):
    return {
        "z": _random_vector_table(kernel.z),
        "zbar": [
            encode_exact([list(v) for v in per_atom]) for per_atom in kernel.zbar.values
        ],
        "gap": rat_str(kernel.gap),
    }


def _guarded(label: str, guard: int, fn):
    budget = Budget(guard, label)
    try:
        return fn(budget), None
    except SizeGuardExceeded as exc:
        return None, str(exc)


def run_checks(model: Model, seed: int, guard: int, skip: set[str]) -> dict:
    tm = model.trade_map
    checks: dict = {}
    certificates: dict = {}

    if "axioms" not in skip:
        rep = validate_axioms(tm, n_samples=64, seed=seed)
        checks["axioms"] = {"ok": rep.ok, "violations": list(rep.violations)}

    if "hn0" not in skip:
        if model.kind == "security":
            res = check_hn0_structural("security", model.filtration)
        elif model.kind in ("currency1", "currency2"):
            res = check_hn0_structural(
                model.kind, model.filtration, costs=model.market_data["costs"]
            )
        else:
            res = None
        checks["hn0_structural"] = (
            None if res is None else {"verdict": res.verdict, "reason": res.reason}
        )

    if "naw" not in skip:
        res = check_naw(tm)
        checks["naw"] = {"verdict": res.verdict}
        if res.arbitrage:
            certificates["arbitrage"] = {
                "strategy": _strategy_table(res.certificate.strategy),
                "terminal_wealth": encode_exact(
                    [list(v) for v in res.certificate.terminal]
                ),
            }
        else:
            certificates["weak_kernel"] = _random_vector_table(res.weak_kernel)

    cps = None
    if "cps" not in skip:
        cps = find_cps(tm)
        checks["cps"] = {"found": cps.found}
        if cps.found:
            certificates["kernel"] = _kernel_payload(cps.kernel)
        else:
            checks["cps"]["gap"] = (
                rat_str(cps.certificate.gap) if cps.certificate.gap is not None else None
            )

    if "ef" not in skip:
        res, overrun = _guarded("ef", guard, lambda b: check_ef(tm, b))
        if overrun:
            checks["ef"] = {"verdict": "GuardExceeded", "detail": overrun}
        else:
            checks["ef"] = {"verdict": "Holds" if res.holds else "Fails"}
            if not res.holds:
                checks["ef"]["t"] = res.t
                certificates["ef_witness"] = {
                    "value": _random_vector_table(res.witness),
                    "trade": _strategy_table(res.eta),
                    "reverse_trade": _strategy_table(res.eta_rev),
                }

    if "nas" not in skip:
        res, overrun = _guarded("nas", guard, lambda b: check_nas_direct(tm, b))
        if overrun:
            checks["nas"] = {"verdict": "GuardExceeded", "detail": overrun}
        else:
            checks["nas"] = {"verdict": "Holds" if res.holds else "Fails"}
            if not res.holds:
                checks["nas"].update({"t": res.t, "reason": res.reason})
                certificates["nas_witness"] = _random_vector_table(res.witness)

    if "nar" not in skip:
        res, overrun = _guarded("nar", guard, lambda b: check_nar(tm, b))
        if overrun:
            checks["nar"] = {"verdict": "GuardExceeded", "detail": overrun}
        else:
            checks["nar"] = {"verdict": res.verdict}
            if res.holds:
                checks["nar"]["improved_slots"] = len(res.improvements)
            else:
                checks["nar"]["conditional_on_reversibility_axiom"] = (
                    res.conditional_on_reversibility_axiom
                )
    return {"checks": checks, "certificates": certificates}


def _projection_payload(rep: ProjectionReport) -> dict:
    return {
        "kind": rep.kind,
        "all_ok": rep.all_ok,
        "q": [rat_str(p) for p in rep.q.probs],
        "projections": {
            name: {str(list(key)): rat_str(value) for key, value in table.items()}
            for name, table in rep.projections.items()
        },
        "rows": [
            {
                "t": r.t,
                "atom": r.atom,
                "pair": list(r.pair),
                "label": r.label,
                "lhs": rat_str(r.lhs),
                "rhs": rat_str(r.rhs),
                "strict": r.strict,
                "ok": r.ok,
            }
            for r in rep.rows
        ],
        "martingale_checks": [
            {
                "name": c.name,
                "ok": c.verdict.ok,
                "first_failure": list(c.verdict.failure) if c.verdict.failure else None,
            }
            for c in rep.martingale_checks
        ],
        "bayes_consistent": rep.bayes_consistent,
    }


def cmd_check(model: Model, args) -> dict:
    skip = set(args.skip.split(",")) if args.skip else set()
    started = time.monotonic()
    payload = run_checks(model, args.seed, args.guard, skip)
    payload["timing_ms"] = round((time.monotonic() - started) * 1000) if args.timing else None
    return payload


def cmd_hedge(model: Model, args) -> dict:
    if args.claim not in model.claims:
        raise UnknownClaim(f"claim {args.claim!r} not present in the model file")
    res = superhedge_membership(model.trade_map, model.claims[args.claim])
    payload: dict = {"claim": args.claim, "attainable": res.attainable}
    if res.attainable:
        payload["strategy"] = _strategy_table(res.strategy)
        payload["disposal"] = encode_exact([list(v) for v in res.disposal])
    payload["timing_ms"] = None
    return payload


def cmd_report(model: Model, args) -> dict:
    cps = find_cps(model.trade_map)
    if not cps.found:
        raise NoKernel("no pricing kernel exists for this model")
    if model.kind == "security":
        rep = report_security(model.market_data["pi"], model.filtration, cps.kernel)
    elif model.kind == "currency1":
        if "prices" not in model.market_data:
            raise UnknownKind("currency1 report needs price data, not raw rates")
        rep = report_currency1(
            model.market_data["prices"], model.market_data["costs"],
            model.filtration, cps.kernel,
        )
    elif model.kind == "currency2":
        rep = report_currency2(
            model.market_data["rates"], model.market_data["costs"],
            model.filtration, cps.kernel,
        )
    else:
        raise UnknownKind("projection reports exist only for named market kinds")
    payload = _projection_payload(rep)
    payload["kernel"] = _kernel_payload(cps.kernel)
    payload["timing_ms"] = None
    return payload


def _summary(payload: dict) -> str:
    lines = []
    for name, result in payload.get("checks", {}).items():
        if result is None:
            continue
        verdict = result.get("verdict") or (
            "ok" if result.get("ok") else result.get("found")
        )
        lines.append(f"{name}: {verdict}")
    if "attainable" in payload:
        lines.append(f"hedge: {'Attainable' if payload['attainable'] else 'Not'}")
    if "all_ok" in payload:
        lines.append(f"report: {'pass' if payload['all_ok'] else 'FAIL'}")
    return "\n".join(lines)


def _install_lp_dump(path: str) -> None:
    fh = open(path, "w", encoding="utf-8")

    def dump(lp, outcome):
        fh.write(f"lp vars={lp.n} rows={len(lp.rows)} status={outcome.status}")
        if outcome.value is not None:
            fh.write(f" value={rat_str(outcome.value)}")
        fh.write("\n")
        for coeffs, rel, rhs in lp.rows:
            fh.write("  " + " ".join(rat_str(c) for c in coeffs) + f" {rel} {rat_str(rhs)}\n")
        fh.flush()

    lp_module.DUMP = dump


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="arbcheck",
        description="Exact no-arbitrage analysis of finite markets with transaction costs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("check", "hedge", "report"):
        p = sub.add_parser(name)
        p.add_argument("model", help="path to a model JSON file")
        p.add_argument("--seed", type=int, default=0, help="sampler seed")
        p.add_argument("--guard", type=int, default=DEFAULT_GUARD,
                       help="work budget per guarded check")
        p.add_argument("--out", default=None, help="write the JSON report here")
        p.add_argument("--dump-lp", default=None, help="append solved programs to this file")
        p.add_argument("--timing", action="store_true", help="record wall-clock timing")
        if name == "check":
            p.add_argument("--skip", default="", help="comma-separated checks to skip")
        if name == "hedge":
            p.add_argument("claim", help="claim name from the model file")
    args = parser.parse_args(argv)

    if args.dump_lp:
        _install_lp_dump(args.dump_lp)

    try:
        model = load_model(args.model)
        if args.command == "check":
            payload = cmd_check(model, args)
        elif args.command == "hedge":
            payload = cmd_hedge(model, args)
        else:
            payload = cmd_report(model, args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except InternalInvariantViolation as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 3
    except ArbcheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(_summary(payload))
    return 0


if __name__ == "__main__":
    sys.exit(main())
