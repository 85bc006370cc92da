"""Command-line entry point: ``dtharmonics {eval,verify,finsler}``.

Exit codes: 0 success, 1 failed verification, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import finsler as fs
from . import serialize as ser
from . import verify
from .config import RunConfig
from .dtensor import HarmonicCombination, HarmonicSignature, SignatureError
from .scalar import AnglePoint, AngularTriple, eval_harmonic

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_GRID = ((1.0, 1.0, 0.0), (1.0, 1.0, 1.0), (2.0, 0.5, -1.0))


class UsageError(Exception):
    pass


def _floats(text: str, count: int, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"{what} must be {count} comma-separated numbers, got {text!r}") from None
    if len(vals) != count:
        raise UsageError(f"{what} must be {count} comma-separated numbers, got {text!r}")
    return vals


def parse_triple(text: str) -> AngularTriple:
    """``"l,m,n"`` or ``"l=1 m=0 n=0"``."""
    text = text.strip()
    try:
        if "=" in text:
            kv = dict(tok.split("=") for tok in text.replace(",", " ").split())
            if set(kv) != {"l", "m", "n"}:
                raise ValueError
            vals = (int(kv["l"]), int(kv["m"]), int(kv["n"]))
        else:
            vals = tuple(int(x) for x in text.split(","))
            if len(vals) != 3:
                raise ValueError
    except ValueError:
        raise UsageError(f"cannot parse triple {text!r}; expected 'l,m,n' or 'l=. m=. n=.'") from None
    try:
        return AngularTriple(*vals)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_scale(text: str) -> complex:
    """A numeric constant such as ``-sqrt(3)`` or ``I*sqrt(6)``."""
    import sympy

    try:
        return complex(sympy.sympify(text))
    except (sympy.SympifyError, TypeError, ValueError, SyntaxError):
        raise UsageError(f"cannot parse scale {text!r}") from None


def _config(args) -> RunConfig:
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        return cfg.updated(
            seed=args.seed,
            format=args.format,
            quad_theta=args.quad_theta,
            quad_phi=args.quad_phi,
            quad_beta=args.quad_beta,
            fd_step=args.fd_step,
            tol_prune=args.tol_prune,
            tol_verify=args.tol_verify,
        )
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"bad configuration: {exc}") from None


# ---------------------------------------------------------------- commands


def cmd_eval(args, cfg: RunConfig):
    theta, phi, beta = _floats(args.point, 3, "--point")
    if not 0 <= theta <= np.pi:
        raise UsageError(f"theta must lie in [0, pi], got {theta}")
    p = AnglePoint(theta, phi, beta)
    scale = parse_scale(args.scale)
    results = []
    if args.kind == "scalar":
        for label in args.labels:
            t = parse_triple(label)
            v = scale * eval_harmonic(t, p)
            results.append({"label": f"{t.l},{t.m},{t.n}", "value": ser.complex_to_json(v, cfg.tol_prune)})
    else:
        for label in args.labels:
            try:
                sig = HarmonicSignature.parse(label)
            except SignatureError as exc:
                raise UsageError(str(exc)) from None
            comps = HarmonicCombination.single(sig, scale).evaluate(p).components
            results.append(
                {
                    "label": str(sig),
                    "variances": [v.value for v in sig.variances],
                    "value": ser.array_to_json(comps, cfg.tol_prune),
                }
            )
    out = {
        "kind": args.kind,
        "point": {"theta": theta, "phi": phi, "beta": beta},
        "scale": ser.complex_to_json(scale),
        "results": results,
    }
    if cfg.format == "table":
        lines = [f"{r['label']}: {r['value']}" for r in results]
        return "\n".join(lines) + "\n", EXIT_OK
    return ser.dumps(out), EXIT_OK


def cmd_verify(args, cfg: RunConfig):
    checks = verify.run_suite(args.suite, cfg)
    ok = all(c.passed for c in checks)
    if cfg.format == "table":
        lines = [c.line() for c in checks]
        lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
        text = "\n".join(lines) + "\n"
    else:
        text = ser.dumps(
            {
                "suite": args.suite,
                "config": cfg.to_dict(),
                "passed": ok,
                "checks": [c.to_dict() for c in checks],
            }
        )
    return text, EXIT_OK if ok else EXIT_FAIL


def load_model(spec: str, cfg: RunConfig) -> fs.LagrangianModel:
    if spec in fs.BUILTIN_MODELS:
        return fs.builtin_model(spec)
    try:
        model = fs.LagrangianModel.from_expression(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rng = np.random.default_rng(cfg.seed)
    samples = rng.uniform([0.5, 0.2, -2.0], [2.0, 2.0, 2.0], size=(8, 3)).tolist()
    try:
        model.check_homogeneity(samples)
    except fs.HomogeneityError as exc:
        raise UsageError(str(exc)) from None
    return model


def cmd_finsler(args, cfg: RunConfig):
    model = load_model(args.model, cfg)
    grid = [_floats(g, 3, "--grid") for g in args.grid] if args.grid else list(DEFAULT_GRID)
    try:
        if args.task == "momenta":
            comb = fs.momenta(model)
        elif args.task == "metric":
            comb = fs.finsler_metric(model)
        else:
            comb = fs.inverse_metric(model)
        rows = comb.sample(grid)
        # components in the frame x = (0, 0, r), xdot = (rhobar, 0, zbar)
        origin = AnglePoint(0.0, 0.0, 0.0)
        g = fs.finsler_metric(model) if args.task == "inverse" else None
        for row, (r, rho, z) in zip(rows, grid):
            comps = comb.bind(r, rho, z).evaluate(origin).components
            for c in row["coefficients"]:
                c["value"] = ser.complex_to_json(complex(*c["value"]), cfg.tol_prune)
            row["components"] = ser.array_to_json(comps, cfg.tol_prune)
            if g is not None:
                gm = g.bind(r, rho, z).evaluate(origin).components
                row["metric_times_inverse_error"] = float(np.abs(gm @ comps - np.eye(3)).max())
    except fs.DegenerateMetric as exc:
        raise UsageError(f"degenerate metric: {exc}") from None
    if cfg.format == "table":
        lines = []
        for row in rows:
            head = f"r={row['r']} rhobar={row['rhobar']} zbar={row['zbar']}"
            coefs = ", ".join(f"{c['signature']}: {c['value']}" for c in row["coefficients"])
            lines.append(f"{head}  {coefs}")
        return "\n".join(lines) + "\n", EXIT_OK
    out = {
        "model": model.name,
        "task": args.task,
        "variances": [v.value for v in comb.variances],
        "frame": "x = (0, 0, r), xdot = (rhobar, 0, zbar)",
        "grid": rows,
    }
    return ser.dumps(out), EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=("json", "table"))
    common.add_argument("--quad-theta", type=int, help="Gauss order in cos(theta)")
    common.add_argument("--quad-phi", type=int, help="uniform nodes in phi")
    common.add_argument("--quad-beta", type=int, help="uniform nodes in beta")
    common.add_argument("--fd-step", type=float, help="finite-difference step for first-order flows")
    common.add_argument("--tol-prune", type=float, help="drop output values below this magnitude")
    common.add_argument("--tol-verify", type=float, help="override every check tolerance")

    parser = argparse.ArgumentParser(prog="dtharmonics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common], help="evaluate harmonics at an angle point")
    ev.add_argument("kind", choices=("scalar", "dtensor"))
    ev.add_argument("labels", nargs="+", help="'l,m,n' triples or 'l0|l1,..;m,n;v,..' signatures")
    ev.add_argument("--point", default="0,0,0", help="theta,phi,beta (default 0,0,0)")
    ev.add_argument("--scale", default="1", help="constant factor, e.g. -sqrt(3)")
    ev.set_defaults(func=cmd_eval)

    ve = sub.add_parser("verify", parents=[common], help="run identity checks")
    ve.add_argument("suite", choices=tuple(verify.SUITES) + ("all",))
    ve.set_defaults(func=cmd_verify)

    fi = sub.add_parser("finsler", parents=[common], help="harmonic Finsler quantities on a grid")
    fi.add_argument("model", help=f"one of {sorted(fs.BUILTIN_MODELS)} or an expression in r, rho, z")
    fi.add_argument("task", choices=("momenta", "metric", "inverse"))
    fi.add_argument("--grid", action="append", help="r,rhobar,zbar (repeatable)")
    fi.set_defaults(func=cmd_finsler)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        text, code = args.func(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    stdout.write(text)
    return code


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
