"""Command line front end: verification suites and single computations.

    frobkern verify <suite> [--kind K --n N --p 2,3 --r R --dmax D --imax I --budget B]
    frobkern h1 --kind gl --n 2 --p 3 --module coordring --degree 2
    frobkern scan --kind sl,gl --n 2 --p 2,3 --dmax 6 --module nilcone
    frobkern report report.json --format text

Reports are deterministic: items are sorted by (suite, p, r, degree) with
ties kept in generation order, and timings only appear in the optional
``timings`` field (``--timings``).  Exit codes: 0 pass or skipped, 1 some
item failed or was refused, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from .frobcoh import (
    DimensionCapError,
    dist_sl2,
    gr_invariants,
    h1_induced_map,
    h1_restricted,
    hopf_h1,
)
from .exactlin import same_span
from .invariants import (
    family,
    frobenius_power_subspace,
    hilbert_check,
    lemma11_check,
    restriction_surjectivity_check,
)
from .liealg import UnsupportedCharacteristicError, check_hypotheses, construct, parse_kind
from .modconstruct import (
    HypothesisGateError,
    adjoint,
    coordring_piece,
    group_coordring_piece,
    group_lie_algebra,
    natural,
    nilcone_piece,
    sym_power_dual,
    sym_power_natural,
    trivial,
    u_piece,
)

SUITES = ("thm21", "thm22", "thm31", "thm32", "thm42", "lemma11", "lemma41", "bn-criteria", "explore")

DEFAULTS = {
    "thm21": dict(kind="gl", n=2, primes=(2, 3, 5), dmax=8),
    "thm22": dict(kind="gl", n=2, primes=(2, 3, 5), dmax=10),
    "thm31": dict(group="SL2", primes=(3,), dmax=3, budget=9),
    "thm32": dict(group="B", primes=(3,), dmax=3, budget=9),
    "thm42": dict(kind="sl", n=2, primes=(3,), r=2, dmax=3),
    "lemma11": dict(kind="gl", n=2, primes=(2, 3), dmax=8),
    "lemma41": dict(kind="sl", n=2, primes=(3,), r=2, dmax=9),
    "bn-criteria": dict(kind="sl", n=2, primes=(3,), r=1, imax=12),
    "explore": dict(kind="sl", n=2, primes=(2,), dmax=4),
}


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    kind: str = "gl"
    n: int = 2
    primes: tuple = (2,)
    dmax: int = 4
    r: int = 1
    imax: int = 12
    seed: int = 0
    budget: int = 9
    group: str = "SL2"
    fmt: str = "json"
    dim_cap: int = 2000
    optional: bool = False

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}")
        for name in ("dmax", "imax", "budget"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.r < 1 or self.dim_cap < 1 or self.n < 1:
            raise ValueError("r, n and dim_cap must be positive")

    def echo(self) -> dict:
        d = asdict(self)
        d["primes"] = list(self.primes)
        d.pop("fmt")
        return d


@dataclass
class VerificationReport:
    config: dict
    items: list = field(default_factory=list)
    timings: list | None = None
    version: str = __version__

    @property
    def overall(self) -> bool:
        return all(it["pass"] for it in self.items)

    def body(self) -> dict:
        out = {"version": self.version, "config": self.config, "items": self.items,
               "overall": self.overall}
        if self.timings is not None:
            out["timings"] = self.timings
        return out


def exit_code(report: VerificationReport) -> int:
    if report.config.get("suite") == "explore":
        return 0
    return 0 if report.overall else 1


# -- items ------------------------------------------------------------------------

def _item(suite, kind, n, p, r, module, degree, dims=None, expected=None, ok=True,
          status=None, detail=None) -> dict:
    if status is None:
        status = "pass" if ok else "fail"
    return {"suite": suite,
            "context": {"kind": kind, "n": n, "p": p, "r": r, "module": module, "degree": degree},
            "dims": dims, "expected": expected, "pass": bool(ok), "status": status,
            "detail": detail or {}}


def _skip(suite, kind, n, p, r, reason, module=None, degree=None) -> dict:
    return _item(suite, kind, n, p, r, module, degree, ok=True, status="skipped",
                 detail={"reason": reason})


def _refuse(suite, kind, n, p, r, reason, module=None, degree=None, optional=False) -> dict:
    return _item(suite, kind, n, p, r, module, degree, ok=optional, status="refused",
                 detail={"reason": reason})


def _algebra_or_skip(cfg, suite, kind, p, items):
    try:
        g = construct(kind, cfg.n, p)
    except UnsupportedCharacteristicError as exc:
        items.append(_skip(suite, kind, cfg.n, p, cfg.r, str(exc)))
        return None
    rep = check_hypotheses(g)
    if not rep.overall and suite != "explore":
        items.append(_skip(suite, kind, cfg.n, p, cfg.r, "; ".join(rep.reasons())))
        return None
    return g


def _suite_thm21(cfg, kind):
    items = []
    suite = cfg.suite
    for p in cfg.primes:
        g = _algebra_or_skip(cfg, suite, kind, p, items)
        if g is None:
            continue
        for d in range(cfg.dmax + 1):
            M = coordring_piece(g, d)
            rep = h1_restricted(g, M)
            items.append(_item(suite, kind, cfg.n, p, 1, M.label, d, rep.dims(), 0, rep.h1 == 0))
    return items


def _suite_colimit(cfg):
    items = []
    group = cfg.group
    for p in cfg.primes:
        try:
            group_lie_algebra(group, p)
            group_coordring_piece(group, p, 0)
        except (UnsupportedCharacteristicError, ValueError) as exc:
            items.append(_skip(cfg.suite, group, 2, p, 1, str(exc)))
            continue
        g = group_lie_algebra(group, p)
        for d in range(cfg.dmax + 1):
            F = group_coordring_piece(group, p, d)
            rep = h1_restricted(g, F)
            fate = h1_induced_map(group, p, d, max(cfg.budget, d))
            detail = {"classes": fate.h1,
                      "dies_at": [f.dies_at for f in fate.fates],
                      "induced_rank": {str(k): v for k, v in sorted(fate.ranks.items())},
                      "budget": cfg.budget}
            items.append(_item(cfg.suite, group, 2, p, 1, F.label, d, rep.dims(),
                               "all classes die within budget", fate.all_die, detail=detail))
    return items


def _suite_thm42(cfg):
    items = []
    kind = cfg.kind
    for p in cfg.primes:
        base, _ = parse_kind(kind)
        if kind != "sl" or cfg.n != 2:
            items.append(_skip(cfg.suite, kind, cfg.n, p, cfg.r,
                               "higher Frobenius kernels are implemented for SL_2 only"))
            continue
        g = _algebra_or_skip(cfg, cfg.suite, "sl", p, items)
        if g is None:
            continue
        b = construct("borel-of-sl", 2, p)
        for borel, alg in ((False, g), (True, b)):
            label = "borel-of-sl" if borel else "sl"
            try:
                A = dist_sl2(p, cfg.r, borel=borel)
            except DimensionCapError as exc:
                items.append(_refuse(cfg.suite, label, 2, p, cfg.r, str(exc), optional=cfg.optional))
                continue
            for d in range(cfg.dmax + 1):
                M = coordring_piece(alg, d, lift=True)
                rep = hopf_h1(A, M)
                items.append(_item(cfg.suite, label, 2, p, cfg.r, M.label, d, rep.dims(), 0,
                                   rep.h1 == 0))
    return items


def _suite_lemma11(cfg):
    items = []
    sub, base = parse_kind(cfg.kind)
    fam = "u" if sub == "borel" else "nilcone"
    for p in cfg.primes:
        g = _algebra_or_skip(cfg, cfg.suite, cfg.kind, p, items)
        if g is None:
            continue
        for c in lemma11_check(g, fam, cfg.dmax):
            items.append(_item(cfg.suite, cfg.kind, cfg.n, p, 1, f"k[{fam}]", c.degree,
                               {"der": None, "rder": None, "inner": None, "inv": c.lhs, "h1": None},
                               "invariants = span of p-th powers", c.ok,
                               detail={"invariants": c.lhs, "powers": c.rhs}))
        if fam == "nilcone":
            for c in restriction_surjectivity_check(g, cfg.dmax):
                items.append(_item("lemma11-restriction", cfg.kind, cfg.n, p, 1, "k[g]->k[N]",
                                   c.degree, None, "image = invariants of k[N]", c.ok,
                                   detail={"image": c.lhs, "invariants": c.rhs}))
            for c in hilbert_check(g, cfg.dmax):
                items.append(_item("lemma11-hilbert", cfg.kind, cfg.n, p, 1, "k[g]", c.degree,
                                   None, "free over invariant generators", c.ok,
                                   detail={"dim": c.lhs, "predicted": c.rhs}))
    return items


def _suite_lemma41(cfg):
    items = []
    for p in cfg.primes:
        if cfg.kind != "sl" or cfg.n != 2:
            items.append(_skip(cfg.suite, cfg.kind, cfg.n, p, cfg.r,
                               "G_r-invariants are implemented for SL_2 only"))
            continue
        g = _algebra_or_skip(cfg, cfg.suite, "sl", p, items)
        if g is None:
            continue
        q = p ** cfg.r
        piece_of = family(g, "nilcone", lift=True)
        for d in range(cfg.dmax + 1):
            inv = gr_invariants(piece_of(d), cfg.r).basis
            frob = frobenius_power_subspace(piece_of, d, q)
            ok = same_span(inv, frob, p)
            items.append(_item(cfg.suite, "sl", 2, p, cfg.r, "k[N]", d,
                               {"der": None, "rder": None, "inner": None, "inv": inv.shape[1],
                                "h1": None},
                               f"invariants = span of {q}-th powers", ok,
                               detail={"invariants": inv.shape[1], "powers": frob.shape[1]}))
    return items


def bn_expected(kind: str, n: int, p: int, r: int, i: int) -> bool:
    """Nonvanishing of H^1(G_r, S^i V) (equivalently S^i V*) from the closed-form criteria."""
    if kind == "sl":
        if n == 2:
            return any((i + 2 * p ** s) % p ** r == 0 for s in range(r))
        if n == 3:
            return p == 2 and (i - 2 ** (r - 1)) % 2 ** r == 0
        return False
    if kind == "sp":
        return p == 2 and i % 2 == 1
    return False


def _suite_bn(cfg):
    items = []
    kind = cfg.kind
    for p in cfg.primes:
        try:
            g = construct(kind, cfg.n, p)
        except UnsupportedCharacteristicError as exc:
            items.append(_skip(cfg.suite, kind, cfg.n, p, cfg.r, str(exc)))
            continue
        if cfg.r > 1 and (kind != "sl" or cfg.n != 2):
            items.append(_skip(cfg.suite, kind, cfg.n, p, cfg.r,
                               "higher Frobenius kernels are implemented for SL_2 only"))
            continue
        A = None
        if cfg.r > 1:
            try:
                A = dist_sl2(p, cfg.r)
            except DimensionCapError as exc:
                items.append(_refuse(cfg.suite, kind, cfg.n, p, cfg.r, str(exc), optional=cfg.optional))
                continue
        for i in range(cfg.imax + 1):
            want = bn_expected(kind, cfg.n, p, cfg.r, i)
            for make in (sym_power_natural, sym_power_dual):
                M = make(g, i)
                rep = h1_restricted(g, M) if A is None else hopf_h1(A, M)
                items.append(_item(cfg.suite, kind, cfg.n, p, cfg.r, M.label, i, rep.dims(),
                                   "nonzero" if want else "zero", (rep.h1 != 0) == want))
    return items


def _suite_explore(cfg):
    items = []
    for p in cfg.primes:
        try:
            g = construct(cfg.kind, cfg.n, p)
        except UnsupportedCharacteristicError as exc:
            items.append(_item("explore", cfg.kind, cfg.n, p, 1, None, None, status="info",
                               detail={"reason": str(exc)}))
            continue
        hyp = check_hypotheses(g)
        note = {"hypotheses": hyp.overall, "reasons": hyp.reasons()}
        for d in range(cfg.dmax + 1):
            M = coordring_piece(g, d)
            rep = h1_restricted(g, M)
            items.append(_item("explore", cfg.kind, cfg.n, p, 1, M.label, d, rep.dims(),
                               status="info", detail=note))
        for i in range(cfg.dmax + 1):
            M = sym_power_natural(g, i)
            rep = h1_restricted(g, M)
            items.append(_item("explore", cfg.kind, cfg.n, p, 1, M.label, i, rep.dims(),
                               status="info", detail=note))
    return items


def _sort_key(item):
    c = item["context"]
    return (item["suite"], c["p"] if c["p"] is not None else -1, c["r"] if c["r"] is not None else 0,
            c["degree"] if c["degree"] is not None else -1)


def run_suite(cfg: SuiteConfig, timings: bool = False) -> tuple[VerificationReport, int]:
    """Run one suite; returns the report and the process exit code."""
    os.environ["FROBKERN_DIM_CAP"] = str(cfg.dim_cap)
    t0 = time.perf_counter()
    s = cfg.suite
    try:
        if s == "thm21":
            items = _suite_thm21(cfg, cfg.kind)
        elif s == "thm22":
            sub, base = parse_kind(cfg.kind)
            items = _suite_thm21(cfg, f"borel-of-{base or sub}")
        elif s in ("thm31", "thm32"):
            items = _suite_colimit(cfg)
        elif s == "thm42":
            items = _suite_thm42(cfg)
        elif s == "lemma11":
            items = _suite_lemma11(cfg)
        elif s == "lemma41":
            items = _suite_lemma41(cfg)
        elif s == "bn-criteria":
            items = _suite_bn(cfg)
        else:
            items = _suite_explore(cfg)
    except HypothesisGateError as exc:
        items = [_skip(s, cfg.kind, cfg.n, None, cfg.r, str(exc))]
    items.sort(key=_sort_key)
    report = VerificationReport(cfg.echo(), items)
    if timings:
        report.timings = [{"suite": s, "seconds": round(time.perf_counter() - t0, 3)}]
    return report, exit_code(report)


# -- output ---------------------------------------------------------------------------

CSV_FIELDS = ["suite", "kind", "n", "p", "r", "module", "degree", "der", "rder", "inner", "inv",
              "h1", "expected", "pass", "status", "detail"]


def emit_report(report: VerificationReport, fmt: str = "json") -> bytes:
    body = report.body()
    if fmt == "json":
        return (json.dumps(body, indent=2, sort_keys=True) + "\n").encode()
    rows = []
    for it in body["items"]:
        dims = it["dims"] or {}
        row = dict(it["context"])
        row.update({k: dims.get(k) for k in ("der", "rder", "inner", "inv", "h1")})
        row.update(suite=it["suite"], expected=it["expected"], status=it["status"],
                   detail=json.dumps(it["detail"], sort_keys=True))
        row["pass"] = it["pass"]
        rows.append(row)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: "" if row[k] is None else row[k] for k in CSV_FIELDS})
        return buf.getvalue().encode()
    if fmt == "text":
        cols = ["suite", "kind", "n", "p", "r", "module", "degree", "h1", "expected", "status"]
        table = [cols] + [["" if row[c] is None else str(row[c]) for c in cols] for row in rows]
        widths = [max(len(r[k]) for r in table) for k in range(len(cols))]
        lines = ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in table]
        lines.append(f"overall: {'pass' if body['overall'] else 'FAIL'}")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")


def report_from_json(data: dict) -> VerificationReport:
    return VerificationReport(data.get("config", {}), data.get("items", []), data.get("timings"),
                              data.get("version", __version__))


# -- argument parsing ----------------------------------------------------------------------

def _primes(text: str) -> tuple:
    try:
        out = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}")
    if not out:
        raise argparse.ArgumentTypeError("empty prime list")
    return out


def _add_common(sp):
    sp.add_argument("--kind")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=_primes, dest="primes")
    sp.add_argument("--r", type=int)
    sp.add_argument("--dmax", type=int)
    sp.add_argument("--format", choices=("json", "csv", "text"), default="json", dest="fmt")
    sp.add_argument("--output", "-o")
    sp.add_argument("--timings", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frobkern", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    _add_common(v)
    v.add_argument("--imax", type=int)
    v.add_argument("--budget", type=int)
    v.add_argument("--group")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--optional", action="store_true", help="refused items do not fail the suite")

    h = sub.add_parser("h1", help="one H^1 computation")
    _add_common(h)
    h.add_argument("--module", default="coordring",
                   choices=("trivial", "natural", "adjoint", "sym", "sym-dual", "coordring",
                            "nilcone", "u", "group"))
    h.add_argument("--degree", type=int, default=0)
    h.add_argument("--group", default="SL2")

    s = sub.add_parser("scan", help="tabulate H^1 over degrees and primes")
    _add_common(s)
    s.add_argument("--module", default="nilcone", choices=("coordring", "nilcone", "u", "sym"))

    r = sub.add_parser("report", help="re-render a JSON report")
    r.add_argument("path")
    r.add_argument("--format", choices=("json", "csv", "text"), default="text", dest="fmt")
    return ap


def _config_from(args) -> SuiteConfig:
    base = dict(DEFAULTS[args.suite])
    for key in ("kind", "n", "primes", "r", "dmax", "imax", "budget", "group"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    from .frobcoh import dim_cap
    return SuiteConfig(suite=args.suite, seed=args.seed, fmt=args.fmt, dim_cap=dim_cap(),
                       optional=args.optional, **base)


def _module(args, g, p, d):
    m = args.module
    if m == "trivial":
        return trivial(g)
    if m == "natural":
        return natural(g)
    if m == "adjoint":
        return adjoint(g)
    if m == "sym":
        return sym_power_natural(g, d)
    if m == "sym-dual":
        return sym_power_dual(g, d)
    if m == "coordring":
        return coordring_piece(g, d, lift=True)
    if m == "nilcone":
        return nilcone_piece(g, d, lift=True)
    return u_piece(g, d, lift=True)


def _one_h1(args, kind, n, p, r, d, suite):
    try:
        if args.module == "group":
            g = group_lie_algebra(args.group, p)
            M = group_coordring_piece(args.group, p, d)
        else:
            g = construct(kind, n, p)
            M = _module(args, g, p, d)
        if r == 1:
            rep = h1_restricted(g, M)
        else:
            if g.kind not in ("sl", "borel") or g.family != "sl" or g.n != 2:
                return _skip(suite, kind, n, p, r, "higher Frobenius kernels are implemented for SL_2 only",
                             degree=d)
            rep = hopf_h1(dist_sl2(p, r, borel=g.kind == "borel"), M)
    except (UnsupportedCharacteristicError, HypothesisGateError) as exc:
        return _skip(suite, kind, n, p, r, str(exc), degree=d)
    except DimensionCapError as exc:
        return _refuse(suite, kind, n, p, r, str(exc), degree=d)
    return _item(suite, kind, n, p, r, M.label, d, rep.dims(), None, True, status="info")


def _write(data: bytes, path):
    if path:
        with open(path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "verify":
            cfg = _config_from(args)
            report, code = run_suite(cfg, timings=args.timings)
            _write(emit_report(report, args.fmt), args.output)
            return code
        if args.command == "report":
            with open(args.path) as fh:
                report = report_from_json(json.load(fh))
            _write(emit_report(report, args.fmt), None)
            return 0
        kinds = (args.kind or "gl").split(",")
        n = args.n or 2
        primes = args.primes or (3,)
        r = args.r or 1
        items = []
        if args.command == "h1":
            for kind in kinds:
                for p in primes:
                    items.append(_one_h1(args, kind, n, p, r, args.degree, "h1"))
            cfg = {"command": "h1", "kind": kinds, "n": n, "primes": list(primes), "r": r,
                   "module": args.module, "degree": args.degree}
        else:
            dmax = 6 if args.dmax is None else args.dmax
            for kind in kinds:
                for p in primes:
                    for d in range(dmax + 1):
                        items.append(_one_h1(args, kind, n, p, r, d, "scan"))
            nonzero = [(it["context"]["kind"], it["context"]["p"], it["context"]["degree"])
                       for it in items if it["dims"] and it["dims"]["h1"]]
            cfg = {"command": "scan", "kind": kinds, "n": n, "primes": list(primes), "r": r,
                   "module": args.module, "dmax": dmax, "nonzero": [list(x) for x in nonzero]}
        items.sort(key=_sort_key)
        report = VerificationReport(cfg, items)
        _write(emit_report(report, args.fmt), args.output)
        return 0 if report.overall else 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"frobkern: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
