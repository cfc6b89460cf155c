"""Command-line entry point: ``mubchan <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import fields, replace

import numpy as np

from .channels import NotCP, axis_channel, kraus
from .choi import ccn, choi, eb_classify, ppt
from .pauli import BadDimension, is_prime, mub_family, verify_mub
from .purity import OptimizerConfig, crossing_experiment, crossing_root, optimize_nu_p, optimize_smin
from .scan import fmt, scan_base_tetrahedron, scan_one_axis, scan_xxyy

log = logging.getLogger("mubchan")


class UsageError(Exception):
    pass


def num(x) -> str:
    return fmt(float(x))


def parse_lambda(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad multiplier list {text!r}") from exc
    if len(vals) < 3:
        raise UsageError("need at least three multipliers")
    return np.array(vals)


def channel_from(args, text: str | None = None):
    lam = parse_lambda(text or args.lam)
    d = args.d if getattr(args, "d", None) else len(lam) - 1
    try:
        return axis_channel(d, lam, checked=True, noise=getattr(args, "noise", 0.0) or 0.0)
    except NotCP as exc:
        raise UsageError(str(exc)) from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def read_config(path: str) -> dict:
    """key = value lines; '#' starts a comment."""
    known = {f.name: f.type for f in fields(OptimizerConfig)}
    alias = {"seed": "rng_seed"}
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = alias.get(key, key)
            if key not in known:
                raise UsageError(f"{path}:{n}: unknown key {key!r}")
            out[key] = float(val) if "tol" in key else int(val)
    return out


def optimizer_config(args) -> OptimizerConfig:
    cfg = OptimizerConfig.from_env(**(read_config(args.config) if args.config else {}))
    if getattr(args, "restarts", None) is not None:
        cfg = replace(cfg, restarts=args.restarts)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, rng_seed=args.seed)
    return cfg


def emit(obj: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(obj, default=_jsonable))
        return
    for k, v in obj.items():
        if isinstance(v, (list, tuple)):
            v = ",".join(fmt(x) for x in v)
        print(f"{k}: {fmt(v)}")


def _jsonable(v):
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(type(v))


def _r(x):
    return float(f"{float(x):.15g}")


def cmd_mub(args) -> int:
    if args.d < 2:
        raise UsageError("d must be >= 2")
    fam = mub_family(args.d)
    if not is_prime(args.d):
        print(
            f"warning: d={args.d} is not prime; using kappa = 3 bases (X, Z, XZ). "
            "Full MUB construction for prime powers is out of scope.",
            file=sys.stderr,
        )
    rep = verify_mub(fam)
    out = {
        "d": fam.d,
        "kappa": fam.kappa,
        "max_overlap_error": _r(rep.max_overlap_error),
        "max_orthogonality_error": _r(rep.max_orthogonality_error),
    }
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(fam.dumps())
    emit(out, args.json)
    return 0


def cmd_channel(args) -> int:
    ch = channel_from(args)
    out = {
        "d": ch.d,
        "cp": ch.is_cp(),
        "s": _r(ch.s),
        "t": [_r(x) for x in ch.t],
        "a00": _r(ch.a00),
        "a": [_r(x) for x in ch.a],
        "kraus_count": len(kraus(ch)),
    }
    emit(out, args.json)
    return 0


def cmd_classify(args) -> int:
    ch = channel_from(args)
    c = ccn(ch)
    p = ppt(choi(ch))
    cls = eb_classify(ch)
    out = {
        "cp": ch.is_cp(),
        "ppt": p.is_ppt,
        "ppt_min_eigenvalue": _r(p.min_eigenvalue),
        "ccn_T": _r(c.T_value),
        "verdict": cls.verdict,
        "evidence": cls.evidence,
    }
    emit(out, args.json)
    return 0


def cmd_choi(args) -> int:
    m = choi(channel_from(args)).matrix
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "col", "re", "im"])
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                w.writerow([i, j, num(m[i, j].real), num(m[i, j].imag)])
    finally:
        if args.out:
            fh.close()
    return 0


def cmd_purity(args) -> int:
    cfg = optimizer_config(args)
    ch = channel_from(args)
    chs = (ch, channel_from(args, args.tensor_with)) if args.tensor_with else ch
    if args.p == "entropy":
        rep = optimize_smin(chs, cfg)
    else:
        try:
            p = float(args.p)
        except ValueError as exc:
            raise UsageError(f"bad p {args.p!r}") from exc
        if not p >= 1:
            raise UsageError("p must be >= 1, inf or 'entropy'")
        rep = optimize_nu_p(chs, p, cfg)
    out = {
        "quantity": "S_min" if args.p == "entropy" else f"nu_{args.p}",
        "value": _r(rep.value),
        "best_seed_value": _r(rep.best_seed_value),
        "converged": rep.converged,
        "restarts": rep.restarts_used,
        "seed": rep.seed,
    }
    if rep.best_product_value is not None:
        out["best_product_value"] = _r(rep.best_product_value)
    emit(out, args.json)
    return 0


def cmd_experiment(args) -> int:
    if args.name != "crossing":
        raise UsageError(f"unknown experiment {args.name!r}")
    if args.step <= 0 or args.stop < args.start:
        raise UsageError("need step > 0 and to >= from")
    n = int(np.floor((args.stop - args.start) / args.step + 1e-9)) + 1
    grid = args.start + args.step * np.arange(n)
    p_list = [float(p) for p in args.p.split(",")] if args.p else []
    rows = crossing_experiment(grid, p_list, optimizer_config(args), with_smin=not args.no_smin)
    cols = list(dict.fromkeys(k for r in rows for k in r))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([fmt(r[c]) if c in r else "" for c in cols])
    finally:
        if args.out:
            fh.close()
    print(f"crossing lambda1* = {num(crossing_root())}", file=sys.stderr)
    return 0


def cmd_scan(args) -> int:
    if args.grid < 2:
        raise UsageError("grid must be >= 2")
    if args.family == "xxyy":
        res = scan_xxyy(args.grid)
    elif args.family == "one_axis":
        if args.d < 2:
            raise UsageError("d must be >= 2")
        res = scan_one_axis(args.d, args.grid)
    else:
        res = scan_base_tetrahedron(args.grid)
    text = res.to_json() if args.format == "json" else res.to_csv()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mubchan", description="Qudit channels constant on MUB axes.")
    ap.add_argument("--config", help="key = value file with optimizer defaults")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def lam_args(p):
        p.add_argument("--lambda", dest="lam", required=True, help="comma-separated multipliers")
        p.add_argument("--d", type=int, help="dimension (default: number of multipliers - 1)")
        p.add_argument("--noise", type=float, default=0.0, help="depolarizing weight, non-prime d only")
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("mub")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--verify", action="store_true", help="accepted for compatibility; always verified")
    p.add_argument("--out", help="write generators and bases as JSON")
    p.set_defaults(func=cmd_mub)

    p = sub.add_parser("channel")
    lam_args(p)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("classify")
    lam_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("choi")
    lam_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_choi)

    p = sub.add_parser("purity")
    lam_args(p)
    p.add_argument("--p", default="2", help="p >= 1, 'inf', or 'entropy'")
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tensor-with", help="multipliers of a second channel")
    p.set_defaults(func=cmd_purity)

    p = sub.add_parser("experiment")
    p.add_argument("name", choices=["crossing"])
    p.add_argument("--from", dest="start", type=float, default=0.60)
    p.add_argument("--to", dest="stop", type=float, default=0.70)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--p", help="comma-separated p values for nu_p columns")
    p.add_argument("--no-smin", action="store_true")
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("scan")
    p.add_argument("family", choices=["xxyy", "one_axis", "base_tetrahedron"])
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        return args.func(args)
    except (UsageError, BadDimension, OSError) as exc:
        print(f"mubchan: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001
        print(f"mubchan: internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
