"""Command-line frontend: ``riskcap price | check | sweep``.

Exit codes: 0 when the analysis ran (whatever the verdicts), 1 when a
property that the acceptance set claims turned out violated, 2 on input
errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .acceptance import AcceptanceSpec, SpecError, spec_from_dict
from .dual import DualCertificate, MAX_DUAL_N, dual_rho, dual_vertices
from .engine import DEFAULT_TOL, EngineError, rho
from .illiquid import PricingError, PricingFunctional, check_quasiconvexity, rho_illiquid
from .properties import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    Verdict,
    axiom_suite,
    cash_subadditivity_report,
    check_numeraire_identity,
)
from .scenario import EligibleAsset, ScenarioError, ScenarioFile, load_scenarios

FAMILIES = ("var", "tvar", "shortfall", "scenario", "expectation")
SUITES = ("axioms", "cash-sub", "quasiconvex", "numeraire", "dual")
DUAL_MATCH_TOL = 1e-8


class InputError(Exception):
    pass


def _render(v: float):
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return v


def _json_or_file(text: str, what: str):
    """Parse ``text`` as JSON, or as the path of a file holding JSON."""
    stripped = text.strip()
    if not stripped.startswith(("{", "[")):
        path = Path(text)
        if not path.is_file():
            raise InputError(f"{what}: no such file {text!r}")
        stripped = path.read_text(encoding="utf-8")
    try:
        return json.loads(stripped)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed {what} JSON: {exc}") from None


@dataclass
class RunConfig:
    data: ScenarioFile
    spec_obj: dict
    spec: AcceptanceSpec
    asset: EligibleAsset
    pi: PricingFunctional | None
    tol: float
    seed: int
    budget: int
    fmt: str

    @property
    def names(self) -> list[str]:
        return self.data.columns

    def positions(self) -> list[np.ndarray]:
        return [pos.x for pos in self.data.positions]

    def with_spec(self, obj: dict) -> AcceptanceSpec:
        return spec_from_dict(obj, self.data.space.n)


def _spec_object(args) -> dict:
    if args.acceptance is not None:
        if args.family is not None:
            raise InputError("use either --acceptance or --family, not both")
        obj = _json_or_file(args.acceptance, "acceptance")
        if not isinstance(obj, dict):
            raise InputError("acceptance JSON must be an object")
        return obj
    if args.family is None:
        raise InputError("an acceptance set is required (--acceptance or --family)")
    obj: dict = {"type": args.family}
    if args.family == "scenario":
        if args.event is None:
            raise InputError("--family scenario needs --event")
        try:
            obj["event"] = [int(i) for i in args.event.split(",") if i.strip()]
        except ValueError:
            raise InputError(f"bad --event {args.event!r}") from None
    else:
        if args.alpha is None:
            if args.family != "expectation":
                raise InputError(f"--family {args.family} needs --alpha")
            args.alpha = 0.0
        obj["alpha"] = args.alpha
    if args.family == "shortfall":
        if args.utility is None:
            raise InputError("--family shortfall needs --utility")
        u = args.utility.strip()
        obj["utility"] = _json_or_file(u, "utility") if u.startswith("{") else {"kind": u}
    return obj


def build_config(args) -> RunConfig:
    if args.price is None:
        raise InputError("--price is required")
    try:
        data = load_scenarios(args.scenarios)
    except FileNotFoundError:
        raise InputError(f"scenario file not found: {args.scenarios}") from None
    obj = _spec_object(args)
    spec = spec_from_dict(obj, data.space.n)
    spec.validate(data.space)
    asset = EligibleAsset(args.price, data.payoff)
    pi = None
    if args.pi is not None:
        obj_pi = _json_or_file(args.pi, "pricing")
        pi = PricingFunctional.from_dict(obj_pi)
        pi.validate_for(asset)
    if not (args.tol > 0 and math.isfinite(args.tol)):
        raise InputError("--tol must be positive")
    if args.budget < 1:
        raise InputError("--budget must be at least 1")
    return RunConfig(data, obj, spec, asset, pi, args.tol, args.seed, args.budget, args.format)


# --------------------------------------------------------------------------
# output


def _emit_json(obj, out) -> None:
    out.write(json.dumps(obj, indent=2) + "\n")


def _emit_rows(header: list[str], rows: list[list], fmt: str, out) -> None:
    cells = [[_cell(v) for v in row] for row in rows]
    if fmt == "table":
        widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
                  for i, h in enumerate(header)]
        out.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
        for r in cells:
            out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(cells)
    out.write(buf.getvalue())


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        r = _render(v)
        return r if isinstance(r, str) else repr(r)
    return str(v)


# --------------------------------------------------------------------------
# commands


def cmd_price(cfg: RunConfig, out) -> int:
    reports = []
    for name, x in zip(cfg.names, cfg.positions()):
        res = rho(cfg.spec, cfg.data.space, x, cfg.asset, cfg.tol)
        rep = {
            "position": name,
            "rho": res.value.render(),
            "status": res.tag.value,
            "reason": res.reason.value if res.reason is not None else None,
            "method": res.method.value,
            "iterations": res.iterations,
        }
        if cfg.pi is not None:
            rep["rho_pi"] = _render(rho_illiquid(cfg.spec, cfg.data.space, x, cfg.asset, cfg.pi, cfg.tol))
        reports.append(rep)
    if cfg.fmt == "json":
        _emit_json(reports, out)
    else:
        header = list(reports[0])
        _emit_rows(header, [[r[h] for h in header] for r in reports], cfg.fmt, out)
    return 0


def _check_axioms(cfg):
    rep = axiom_suite(cfg.spec, cfg.data.space, cfg.asset, samples=1000, seed=cfg.seed, tol=cfg.tol)
    return {"suite": "axioms", "passed": rep.claimed_pass, "axioms": rep.to_dict()}, not rep.claimed_pass


def _check_cash_sub(cfg):
    v = cash_subadditivity_report(cfg.spec, cfg.data.space, cfg.asset, cfg.budget, cfg.seed, cfg.tol)
    if v.verdict is Verdict.INCONCLUSIVE:
        print("warning: falsification search exhausted its budget without a verdict", file=sys.stderr)
    return {"suite": "cash-sub", **v.to_dict()}, False


def _check_quasiconvex(cfg):
    pi = cfg.pi if cfg.pi is not None else PricingFunctional.linear(cfg.asset.price)
    rep = check_quasiconvexity(cfg.spec, cfg.data.space, cfg.asset, pi, seed=cfg.seed, tol=cfg.tol)
    failed = rep.claimed and not rep.passed
    return {"suite": "quasiconvex", "claimed": rep.claimed, "passed": rep.passed, "trials": rep.trials,
            "worst_violation": _render(rep.worst_violation), "witness": rep.witness}, failed


def _check_numeraire(cfg):
    results, failed = [], False
    for name, x in zip(cfg.names, cfg.positions()):
        chk = check_numeraire_identity(cfg.spec, cfg.data.space, x, cfg.asset, cfg.tol)
        failed |= not chk.passed
        results.append({"position": name, "passed": chk.passed, "direct": _render(chk.direct),
                        "discounted": _render(chk.discounted)})
    return {"suite": "numeraire", "passed": not failed, "positions": results}, failed


def _check_dual(cfg):
    if cfg.data.space.n > MAX_DUAL_N:
        raise InputError(f"dual check needs n <= {MAX_DUAL_N}, got n = {cfg.data.space.n}")
    results, failed = [], False
    for name, x in zip(cfg.names, cfg.positions()):
        primal = rho(cfg.spec, cfg.data.space, x, cfg.asset, cfg.tol).value.value
        dual = dual_rho(cfg.spec, cfg.data.space, x, cfg.asset).value
        certs: list[DualCertificate] = dual_vertices(cfg.spec, cfg.data.space, cfg.asset, x).certificates
        feasible = [c.is_feasible(cfg.spec, cfg.data.space, cfg.asset) for c in certs]
        # weak duality: no certificate may exceed the primal value
        weak = all(c.value <= primal + DUAL_MATCH_TOL for c in certs)
        match = primal == dual or abs(primal - dual) <= DUAL_MATCH_TOL + cfg.tol
        ok = match and weak and all(feasible)
        failed |= not ok
        results.append({"position": name, "primal": _render(primal), "dual": _render(dual),
                        "passed": ok, "certificates": [c.to_dict(f) for c, f in zip(certs, feasible)]})
    return {"suite": "dual", "passed": not failed, "positions": results}, failed


CHECKS = {
    "axioms": _check_axioms,
    "cash-sub": _check_cash_sub,
    "quasiconvex": _check_quasiconvex,
    "numeraire": _check_numeraire,
    "dual": _check_dual,
}


def cmd_check(cfg: RunConfig, suite: str, out) -> int:
    report, failed = CHECKS[suite](cfg)
    _emit_json(report, out)
    return 1 if failed else 0


def sweep_grid(start: float, stop: float, steps: int) -> list[float]:
    # rounding keeps grid points such as 0.75 exact, so thresholds land on them
    return [round(start + (stop - start) * k / (steps - 1), 12) for k in range(steps)]


def cmd_sweep(cfg: RunConfig, param: str, start: float, stop: float, steps: int, out) -> int:
    if steps < 2:
        raise InputError("--steps must be at least 2")
    if not start < stop:
        raise InputError("--from must be smaller than --to")
    if param == "alpha" and "alpha" not in cfg.spec_obj:
        raise InputError(f"acceptance type {cfg.spec_obj.get('type')!r} has no alpha to sweep")
    x = cfg.positions()[0]
    rows = []
    for v in sweep_grid(start, stop, steps):
        spec, asset = cfg.spec, cfg.asset
        if param == "alpha":
            spec = cfg.with_spec({**cfg.spec_obj, "alpha": v})
        else:
            asset = EligibleAsset(v, cfg.asset.payoff)
        res = rho(spec, cfg.data.space, x, asset, cfg.tol)
        verdict = cash_subadditivity_report(spec, cfg.data.space, asset, cfg.budget, cfg.seed, cfg.tol)
        rows.append([v, res.value.value, res.tag.value, verdict.verdict.value])
    fmt = "csv" if cfg.fmt == "json" else cfg.fmt
    _emit_rows(["param", "rho", "status", "cash_sub"], rows, fmt, out)
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenarios", required=True, help="scenario CSV (prob,x,s[,x2,...])")
    common.add_argument("--acceptance", help="acceptance JSON, inline or a file path")
    common.add_argument("--family", choices=FAMILIES, help="acceptance family (instead of --acceptance)")
    common.add_argument("--alpha", type=float, help="level for var/tvar/shortfall/expectation")
    common.add_argument("--utility", help="shortfall utility: exp, linear or a JSON object")
    common.add_argument("--event", help="scenario event as comma-separated 0-based indices")
    common.add_argument("--price", type=float, help="eligible asset price S_0")
    common.add_argument("--pi", help="pricing functional JSON, inline or a file path")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="falsification trial budget")
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")

    parser = argparse.ArgumentParser(prog="riskcap", description="Capital requirements with a defaultable eligible asset.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("price", parents=[common], help="compute rho for every position column")
    chk = sub.add_parser("check", parents=[common], help="run a property suite")
    chk.add_argument("--suite", choices=SUITES, required=True)
    sw = sub.add_parser("sweep", parents=[common], help="tabulate rho and cash subadditivity over a parameter")
    sw.add_argument("--param", choices=("alpha", "price"), required=True)
    sw.add_argument("--from", dest="start", type=float, required=True)
    sw.add_argument("--to", dest="stop", type=float, required=True)
    sw.add_argument("--steps", type=int, required=True)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep" and args.steps < 2:
            raise InputError("--steps must be at least 2")
        if args.command == "sweep" and args.param == "alpha" and args.alpha is None:
            args.alpha = args.start  # overwritten at every grid point
        cfg = build_config(args)
        if args.command == "price":
            return cmd_price(cfg, out)
        if args.command == "check":
            return cmd_check(cfg, args.suite, out)
        return cmd_sweep(cfg, args.param, args.start, args.stop, args.steps, out)
    except (InputError, SpecError, ScenarioError, PricingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # remaining argument guards in the library (e.g. numeraire with a zero payoff)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EngineError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
