"""Command-line front end: ``zetaclt <command> [options]``.

Exit codes: 0 success, 2 usage or domain error, 3 precision or quality
failure (including failed checks), 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import acceptance, randmodel, verify, zetaline
from .coeffs import ExpansionParams, b_prime_table, b_tilde_table, d_table
from .density import (
    DensityModel,
    Rectangle,
    density_flags,
    density_grid,
    rect_probability_detail,
    rect_truncation_budget,
    rectangle_panel,
)
from .errors import BranchError, CapacityError, DomainError, PrecisionError, QualityError
from .series import DEFAULT_ORDER, golden_rows

EXIT_OK, EXIT_USAGE, EXIT_QUALITY, EXIT_INTERNAL = 0, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Validated command-line settings shared by the subcommands."""

    command: str
    theta: float = acceptance.THETA
    T: float = acceptance.T_HEADLINE
    degree: int = acceptance.DEGREE
    prime_limit: int | None = None
    samples: int = 10**6
    seed: int = randmodel.DEFAULT_SEED
    rects: list = field(default_factory=list)
    out: str | None = None
    fmt: str = "json"
    matched: bool = False

    def __post_init__(self):
        if not 0 < self.theta < 0.5:
            raise DomainError(f"--theta must lie in (0, 1/2), got {self.theta}")
        if not self.T >= 100:
            raise DomainError(f"--T must be >= 100, got {self.T}")
        if self.degree < 0:
            raise DomainError("--degree must be >= 0")
        if self.prime_limit is not None and self.prime_limit < 0:
            raise DomainError("--prime-limit must be >= 0")
        if self.samples < 1:
            raise DomainError("--samples must be >= 1")
        if self.seed < 0:
            raise DomainError("--seed must be >= 0")

    def params(self) -> ExpansionParams:
        return ExpansionParams.build(self.theta, self.T, self.degree)

    def model(self) -> DensityModel:
        return DensityModel.build(self.params(), matched=self.matched)


def _emit(cfg: RunConfig, doc) -> None:
    text = json.dumps(acceptance._jsonable(doc), indent=1)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise DomainError(f"range needs two comma-separated numbers, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
        raise DomainError(f"bad range {text!r}")
    return lo, hi


# -- commands ------------------------------------------------------------------------


def cmd_coeffs(cfg: RunConfig, args) -> int:
    fam = args.family
    if fam in ("a", "b"):
        doc = golden_rows(cfg.degree, args.order, families=(fam,))
        _emit(cfg, doc)
        return EXIT_OK
    sigma = cfg.params().sigma_T if cfg.matched else 0.5
    if fam == "d":
        table = d_table(cfg.degree, prime_limit=cfg.prime_limit, N=args.order, sigma=sigma)
    elif fam == "b_prime":
        table = b_prime_table(cfg.degree, N=args.order, sigma=sigma)
    else:
        table = b_tilde_table(cfg.degree, N=args.order)
    if cfg.out:
        table.save(cfg.out)
    else:
        print(table.to_json())
    return EXIT_OK


def cmd_density(cfg: RunConfig, args) -> int:
    if args.points < 1:
        raise DomainError("--points must be >= 1")
    model = cfg.model()
    s = math.sqrt(model.psi)
    xr = _range(args.x_range) if args.x_range else (-3 * s, 3 * s)
    yr = _range(args.y_range) if args.y_range else (-3 * s, 3 * s)
    rows = density_grid(model, np.linspace(*xr, args.points), np.linspace(*yr, args.points))
    fh = open(cfg.out, "w") if cfg.out else sys.stdout
    try:
        fh.write("x,y,F\n")
        for x, y, f in rows:
            fh.write(f"{float(x)!r},{float(y)!r},{float(f)!r}\n")
    finally:
        if cfg.out:
            fh.close()
    flags = density_flags(rows[:, 2])
    if flags:
        print("flags: " + ",".join(flags), file=sys.stderr)
    return EXIT_OK


def cmd_prob(cfg: RunConfig, args) -> int:
    if not cfg.rects:
        raise UsageError("prob needs --rect a,b,c,d")
    model = cfg.model()
    docs = []
    for rect in cfg.rects:
        r = rect_probability_detail(model, rect)
        docs.append(
            {
                "rect": rect.to_json(),
                "D": model.degree,
                "psi": model.psi,
                "value": r.value,
                "gaussian_leading_term": r.gaussian_leading_term,
                "correction_bound": r.correction_bound,
                "flags": r.flags,
            }
        )
    _emit(cfg, docs[0] if len(docs) == 1 else docs)
    return EXIT_OK


def _mc(cfg: RunConfig, seed: int | None = None) -> randmodel.EmpiricalMeasure:
    p = cfg.params()
    limit = acceptance.MC_PRIME_LIMIT if cfg.prime_limit is None else cfg.prime_limit
    rc = randmodel.RandomEulerConfig(p.sigma_T, limit, cfg.samples, cfg.seed if seed is None else seed)
    return randmodel.sample_log_zeta_random(rc)


def _save_measure(cfg: RunConfig, m: randmodel.EmpiricalMeasure) -> None:
    mean, se = m.mean()
    summary = {"count": m.count, "excluded": m.excluded, "mean": mean, "mean_stderr": se, **m.header}
    if cfg.out:
        m.save(cfg.out, cfg.fmt)
        summary["written"] = cfg.out
    print(json.dumps(acceptance._jsonable(summary), indent=1))


def cmd_mc(cfg: RunConfig, args) -> int:
    _save_measure(cfg, _mc(cfg))
    return EXIT_OK


def cmd_zeta_empirical(cfg: RunConfig, args) -> int:
    progress = None
    if args.progress:
        progress = lambda done, total: print(f"{done}/{total}", file=sys.stderr)
    m = zetaline.empirical_zeta_measure(cfg.theta, cfg.T, cfg.samples, cfg.seed, progress=progress)
    _save_measure(cfg, m)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    checks = verify.run_suite(args.suite, quick=args.quick, echo=print)
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump([c.to_dict() for c in checks], fh, indent=1)
    return EXIT_QUALITY if failed else EXIT_OK


def cmd_compare(cfg: RunConfig, args) -> int:
    """Expansion, random-model MC and (optionally) zeta-line values per rectangle."""
    p = cfg.params()
    model = cfg.model()
    rects = {",".join(f"{v:g}" for v in r.as_tuple()): r for r in cfg.rects} if cfg.rects else rectangle_panel()
    mc = _mc(cfg)
    tail = randmodel.tail_rect_budget(mc.header["tail_std"], p.psi)
    mc2 = _mc(cfg, cfg.seed + 1) if args.self_test else None
    zl = None
    if args.zeta_samples:
        zl = zetaline.empirical_zeta_measure(cfg.theta, cfg.T, args.zeta_samples, cfg.seed)
    rows = []
    disagreements = 0
    for name, rect in rects.items():
        e = rect_probability_detail(model, rect).value
        trunc = 0.0 if rect.degenerate else rect_truncation_budget(model, rect)
        v, se = mc.rect_probability(rect, p.psi)
        row = {"rect": name, "bounds": rect.to_json(), "expansion": e, "mc": v, "mc_stderr": se}
        pairs = {"expansion-mc": (abs(e - v), 4 * se + tail + trunc)}
        if mc2 is not None:
            v2, se2 = mc2.rect_probability(rect, p.psi)
            row["mc_seed2"] = v2
            pairs["mc-mc"] = (abs(v - v2), 6 * math.hypot(se, se2))
        if zl is not None:
            z, zse = zl.rect_probability(rect, p.psi)
            row["zeta_line"] = z
            row["zeta_stderr"] = zse
            pairs["expansion-zeta"] = (abs(e - z), args.zeta_tolerance)
        row["pairs"] = {k: {"gap": g, "budget": b, "ok": g <= b} for k, (g, b) in pairs.items()}
        disagreements += sum(not r["ok"] for r in row["pairs"].values())
        rows.append(row)
    head = {**p.to_dict(), "matched": cfg.matched, "samples": cfg.samples, "seed": cfg.seed, "tail_budget": tail}
    if zl is not None:
        head["zeta_samples"] = args.zeta_samples
        head["zeta_excluded"] = zl.excluded
    _emit(cfg, {"params": head, "rows": rows, "disagreements": disagreements})
    for row in rows:
        flags = [k for k, r in row["pairs"].items() if not r["ok"]]
        print(f"{row['rect']:>8}  exp={row['expansion']:.5f}  mc={row['mc']:.5f}  " + ("DISAGREE " + ",".join(flags) if flags else "ok"), file=sys.stderr)
    return EXIT_QUALITY if disagreements else EXIT_OK


# -- parser ----------------------------------------------------------------------------------------


def _common(sp, samples_default=None):
    sp.add_argument("--theta", type=float, default=acceptance.THETA)
    sp.add_argument("--T", type=float, default=acceptance.T_HEADLINE)
    sp.add_argument("--degree", type=int, default=acceptance.DEGREE)
    sp.add_argument("--matched", action="store_true", help="take the prime sums at sigma_T instead of 1/2")
    sp.add_argument("--out", help="output path (default: stdout)")
    if samples_default is not None:
        sp.add_argument("--samples", type=int, default=samples_default)
        sp.add_argument("--seed", type=int, default=randmodel.DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zetaclt", description="Hermite expansion of the log-zeta CLT and its oracles.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("coeffs", help="export a coefficient table as JSON")
    _common(sp)
    sp.add_argument("--family", choices=("a", "b", "b_prime", "b_tilde", "d"), default="d")
    sp.add_argument("--prime-limit", type=int, help="cross-check prime sums against a sieve up to this limit")
    sp.add_argument("--order", type=int, default=DEFAULT_ORDER, help="q-series truncation order")

    sp = sub.add_parser("density", help="density on a grid as CSV x,y,F")
    _common(sp)
    sp.add_argument("--x-range", help="xmin,xmax in raw log-zeta coordinates (default 3 sqrt(psi))")
    sp.add_argument("--y-range")
    sp.add_argument("--points", type=int, default=41)

    sp = sub.add_parser("prob", help="rectangle probability as JSON")
    _common(sp)
    sp.add_argument("--rect", action="append", default=[], help="a,b,c,d in the sqrt(pi psi)-normalized plane; inf allowed")

    sp = sub.add_parser("mc", help="sample the random Euler product")
    _common(sp, samples_default=10**6)
    sp.add_argument("--prime-limit", type=int)
    sp.add_argument("--format", dest="fmt", choices=("csv", "bin"), default="csv")

    sp = sub.add_parser("zeta-empirical", help="sample log zeta(sigma_T + it) for t in [T, 2T]")
    _common(sp, samples_default=10**4)
    sp.add_argument("--format", dest="fmt", choices=("csv", "bin"), default="csv")
    sp.add_argument("--progress", action="store_true")

    sp = sub.add_parser("verify", help="run a self-check suite")
    sp.add_argument("--suite", choices=verify.SUITE_NAMES, default="all")
    sp.add_argument("--quick", action="store_true")
    sp.add_argument("--out", help="JSON report path")

    sp = sub.add_parser("compare", help="expansion vs random-model MC vs zeta line")
    _common(sp, samples_default=10**6)
    sp.add_argument("--prime-limit", type=int)
    sp.add_argument("--rect", action="append", default=[])
    sp.add_argument("--self-test", action="store_true", help="also compare MC against MC with seed + 1")
    sp.add_argument("--zeta-samples", type=int, default=0)
    sp.add_argument("--zeta-tolerance", type=float, default=0.05)
    return ap


COMMANDS = {
    "coeffs": cmd_coeffs,
    "density": cmd_density,
    "prob": cmd_prob,
    "mc": cmd_mc,
    "zeta-empirical": cmd_zeta_empirical,
    "verify": cmd_verify,
    "compare": cmd_compare,
}


def _config(args) -> RunConfig:
    kw = {"command": args.command}
    for name in ("theta", "T", "degree", "prime_limit", "samples", "seed", "out", "fmt", "matched"):
        if getattr(args, name, None) is not None:
            kw[name] = getattr(args, name)
    kw["rects"] = [Rectangle.parse(r) for r in getattr(args, "rect", [])]
    return RunConfig(**kw)


_VALUE_FLAGS = ("--rect", "--x-range", "--y-range")


def _glue(argv: list[str]) -> list[str]:
    """Attach values such as ``-inf,0,0,1`` to their flag so argparse does not read them as options."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    ap = build_parser()
    argv = _glue(list(sys.argv[1:] if argv is None else argv))
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](cfg, args)
    except (UsageError, DomainError) as exc:
        print(f"zetaclt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, QualityError, BranchError, CapacityError) as exc:
        print(f"zetaclt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_QUALITY
    except Exception as exc:  # anything else is a bug
        print(f"zetaclt: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
