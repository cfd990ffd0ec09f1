"""Command-line surface.

Subcommands: decompose, check, l, evolve, sample, cutoff, verify.
Operators stream as JSON lines ({"basis": "wedge4", "upper": [21 numbers]});
trajectories leave as CSV.  Exit codes: 0 success, 1 semantic failure
(non-member under --require-member, failing suite, failing cutoff bound),
2 input/format error, 3 numerical abort (step underflow).

Behaviour is a pure function of (argv, input files, seed): no clocks and no
environment dependence, except that CURVCONE_SEED supplies the seed when
neither --seed nor a config file does.  An optional config file (plain
``key = value`` lines, # comments) fills in flag defaults but never
overrides a flag given explicitly on the command line.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import verify as vf
from .cone import ConeParams, hat_f, implies_wpic, is_member, lower_bound_l, ricci_pinch_check, two_nonneg_flag, uniform_pic_check
from .cutoff import CutoffFunction, CutoffSpec, theorem_variant_check, verify_cutoff
from .decomposition import decompose
from .flow import StepUnderflowError, TrajectoryConfig, integrate
from .sampling import SamplerConfig, boundary_member, random_bianchi, random_member
from .wedge import (
    frobenius,
    operator_from_json_dict,
    operator_to_json_dict,
    upper_triangle,
)

EXIT_OK, EXIT_SEMANTIC, EXIT_FORMAT, EXIT_NUMERIC = 0, 1, 2, 3

_CSV_COLUMNS = (
    ["t"]
    + [f"r{i+1}{j+1}" for i in range(6) for j in range(i, 6)]
    + ["l", "scalar", "bianchi", "member"]
)


def _err(msg: str) -> None:
    print(f"curvcone: {msg}", file=sys.stderr)


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8")


def _read_operators(path):
    """Yield (line_number, operator) from a JSON-lines file or stdin."""
    stream = sys.stdin if path in (None, "-") else open(path, "r", encoding="utf-8")
    try:
        for lineno, line in enumerate(stream, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                yield lineno, operator_from_json_dict(obj)
            except ValueError as exc:
                raise _LineError(lineno, str(exc)) from exc
    finally:
        if stream is not sys.stdin:
            stream.close()


class _LineError(Exception):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _cone_params(args) -> ConeParams:
    return ConeParams(eta=args.eta, mu=args.mu)


def _finite_or_none(x):
    return None if x is None or not math.isfinite(x) else float(x)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_decompose(args) -> int:
    out = _open_out(args.output)
    try:
        for _, m in _read_operators(args.input):
            out.write(json.dumps(decompose(m).to_json_dict()) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _check_record(m, params, tol):
    f1, f2, f3 = hat_f(m, params)
    lv = lower_bound_l(m, params, tol=tol)
    _, cert = two_nonneg_flag(m, 1, seed=0)
    try:
        pinch = ricci_pinch_check(m, params)
    except ValueError:
        pinch = None
    try:
        upic = uniform_pic_check(m, params)
    except ValueError:
        upic = None
    return {
        "member": is_member(m, params),
        "F1": f1,
        "F2": f2,
        "F3": f3,
        "l": _finite_or_none(lv),
        "wpic": implies_wpic(m, params),
        "flag2_certificate": cert,
        "ricci_pinch_slack": pinch,
        "upic_slack": upic,
    }


def cmd_check(args) -> int:
    params = _cone_params(args)
    out = _open_out(args.output)
    all_member = True
    try:
        for _, m in _read_operators(args.input):
            rec = _check_record(m, params, args.tol)
            all_member = all_member and rec["member"]
            out.write(json.dumps(rec) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    if args.require_member and not all_member:
        return EXIT_SEMANTIC
    return EXIT_OK


def cmd_l(args) -> int:
    params = _cone_params(args)
    out = _open_out(args.output)
    try:
        for _, m in _read_operators(args.input):
            lv = lower_bound_l(m, params, tol=args.tol)
            out.write(json.dumps({"l": _finite_or_none(lv)}) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _csv_row(sample) -> str:
    vals = [repr(float(sample.t))]
    vals += [repr(float(x)) for x in upper_triangle(sample.operator)]
    lv = sample.l
    vals.append("inf" if lv is not None and math.isinf(lv) else repr(float(lv)))
    vals.append(repr(float(sample.scalar)))
    vals.append(repr(float(sample.bianchi)))
    vals.append("1" if sample.member else "0")
    return ",".join(vals)


def cmd_evolve(args) -> int:
    params = _cone_params(args)
    ops = list(_read_operators(args.input))
    if not ops:
        raise _LineError(0, "no operator supplied")
    m = ops[0][1]
    cfg = TrajectoryConfig(
        dt=args.dt, t_max=args.t_max, rtol=args.tol, blowup_norm=args.blowup_norm
    )
    traj = integrate(m, cfg, params=params)
    out = _open_out(args.output)
    try:
        out.write(",".join(_CSV_COLUMNS) + "\n")
        for s in traj.samples:
            out.write(_csv_row(s) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    max_l = max((s.l for s in traj.samples if s.l is not None), default=float("nan"))
    final_norm = frobenius(traj.final.operator)
    print(
        f"status={traj.status} steps={len(traj.samples) - 1} "
        f"max_l={max_l!r} final_norm={final_norm!r}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = SamplerConfig(seed=args.seed, margin=args.margin)
    out = _open_out(args.output)
    try:
        for i in range(args.samples):
            if args.kind == "raw":
                m = random_bianchi(cfg, index=i)
            elif args.kind == "member":
                m = random_member(cfg, _cone_params(args), index=i)
            else:
                face = {"boundary-f1": "F1", "boundary-f2": "F2", "boundary-f3": "F3"}[args.kind]
                m, _ = boundary_member(cfg, _cone_params(args), face, index=i)
            out.write(json.dumps(operator_to_json_dict(m)) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_cutoff(args) -> int:
    spec = CutoffSpec(eps=args.eps, sigma=args.sigma, r=args.r, grid_n=args.grid)
    fn = CutoffFunction(spec)
    rep = verify_cutoff(fn)
    variant = theorem_variant_check(spec)
    print(json.dumps(
        {
            "eps": spec.eps,
            "sigma": spec.sigma,
            "r": spec.r,
            "grid_n": spec.grid_n,
            "passed": rep.passed,
            "bounds": [
                {"name": b.name, "margin": b.margin, "worst_x": b.worst_x}
                for b in rep.bounds
            ],
            "variant_c0": variant.c0,
        },
        indent=2, sort_keys=True,
    ))
    if args.output not in (None, "-"):
        x = np.linspace(spec.r - spec.sigma, spec.r + 2.0 * spec.sigma, spec.grid_n)
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write("x,phi,dphi,d2phi\n")
            for xi, v, d1, d2 in zip(x, fn.value(x), fn.d1(x), fn.d2(x)):
                fh.write(f"{xi!r},{v!r},{d1!r},{d2!r}\n")
    return EXIT_OK if rep.passed else EXIT_SEMANTIC


def cmd_verify(args) -> int:
    report = vf.run(args.suite, seed=args.seed, samples=args.samples)
    sys.stdout.write(vf.report_table(report))
    payload = vf.report_json(report)
    if args.output in (None, "-"):
        sys.stdout.write(payload)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(payload)
    return EXIT_OK if report["all_passed"] else EXIT_SEMANTIC


# ---------------------------------------------------------------------------
# parser and config plumbing
# ---------------------------------------------------------------------------

def _add_cone_flags(p):
    p.add_argument("--eta", type=float, default=1.0, help="cone parameter eta (default 1.0)")
    p.add_argument("--mu", type=float, default=2.0, help="cone parameter mu (default 2.0)")


def _add_io_flags(p, with_input=True):
    if with_input:
        p.add_argument("--input", default="-", help="operator JSON-lines file ('-' = stdin)")
    p.add_argument("--output", default="-", help="output file ('-' = stdout)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="curvcone",
        description="4D curvature operators: decomposition, cone membership, reaction flow, certification suites.",
    )
    p.add_argument("--config", default=None, help="optional key = value config file; explicit flags win")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="block data (A, B, C and spectra) per operator")
    _add_io_flags(d)
    d.set_defaults(func=cmd_decompose)

    c = sub.add_parser("check", help="cone membership report per operator")
    _add_io_flags(c)
    _add_cone_flags(c)
    c.add_argument("--tol", type=float, default=1e-9, help="bisection tolerance for l")
    c.add_argument("--require-member", action="store_true", help="exit 1 unless every operator is a member")
    c.set_defaults(func=cmd_check)

    lp = sub.add_parser("l", help="lower-bound functional l per operator")
    _add_io_flags(lp)
    _add_cone_flags(lp)
    lp.add_argument("--tol", type=float, default=1e-9)
    lp.set_defaults(func=cmd_l)

    e = sub.add_parser("evolve", help="integrate the reaction ODE from the first input operator")
    _add_io_flags(e)
    _add_cone_flags(e)
    e.add_argument("--dt", type=float, default=1e-3, help="initial step (default 1e-3)")
    e.add_argument("--t-max", type=float, default=0.1, dest="t_max")
    e.add_argument("--tol", type=float, default=1e-9, help="relative local-error tolerance")
    e.add_argument("--blowup-norm", type=float, default=1e8, dest="blowup_norm")
    e.set_defaults(func=cmd_evolve)

    s = sub.add_parser("sample", help="emit seeded random operators as JSON lines")
    _add_io_flags(s, with_input=False)
    _add_cone_flags(s)
    s.add_argument("--kind", default="raw",
                   choices=["member", "boundary-f1", "boundary-f2", "boundary-f3", "raw"])
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--samples", type=int, default=10)
    s.add_argument("--margin", type=float, default=0.1)
    s.set_defaults(func=cmd_sample)

    cu = sub.add_parser("cutoff", help="grid-certify a cutoff function")
    cu.add_argument("--eps", type=float, required=True)
    cu.add_argument("--sigma", type=float, required=True)
    cu.add_argument("--r", type=float, required=True)
    cu.add_argument("--grid", type=int, default=10_000)
    cu.add_argument("--output", default=None, help="optional CSV of (x, phi, phi', phi'')")
    cu.set_defaults(func=cmd_cutoff)

    v = sub.add_parser("verify", help="run the certification suites")
    v.add_argument("--suite", default="all",
                   choices=["all", "algebra", "cone", "nullvector", "flow", "cutoff"])
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--samples", type=int, default=1000)
    v.add_argument("--output", default=None, help="write the JSON report here instead of stdout")
    v.set_defaults(func=cmd_verify)

    return p


def _load_config(path) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise _LineError(lineno, "expected 'key = value'")
            key, _, raw = line.partition("=")
            values[key.strip().replace("-", "_")] = raw.strip()
    return values


def _coerce(raw: str):
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw


def _apply_config_and_env(args, argv) -> None:
    explicit = set()
    for tok in argv:
        if tok.startswith("--"):
            explicit.add(tok.split("=", 1)[0][2:].replace("-", "_"))
    cfg = _load_config(args.config) if args.config else {}
    for key, raw in cfg.items():
        if key in explicit or not hasattr(args, key) or key in ("config", "command", "func"):
            continue
        setattr(args, key, _coerce(raw))
    if getattr(args, "seed", "absent") is None:
        env = os.environ.get("CURVCONE_SEED")
        args.seed = int(env) if env is not None else 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the format-error code
        return EXIT_FORMAT if exc.code else EXIT_OK
    try:
        _apply_config_and_env(args, argv)
        return args.func(args)
    except _LineError as exc:
        _err(str(exc))
        return EXIT_FORMAT
    except (ValueError, OSError) as exc:
        _err(str(exc))
        return EXIT_FORMAT
    except StepUnderflowError as exc:
        _err(str(exc))
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
