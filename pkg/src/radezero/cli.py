"""Command-line front end: one dispatcher over every module.

All output is machine-readable so downstream plotting never scrapes logs:
CSV with a header row and 17 significant digits, JSON with sorted keys.
Identical invocations produce byte-identical files.  Exit codes: 0 on
success, 1 on a usage problem (bad flags, unreadable input), 2 on a
numerical failure, in which case the error class name goes to stderr.

The RADEZERO_SEED environment variable, when set, overrides any seed
given on the command line or inside an experiment config.  Seeds parse
as decimal or 0x-prefixed hex.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from contextlib import contextmanager
from importlib import resources
from pathlib import Path

import numpy as np

from radezero.constructions import (
    build_central_dominant,
    build_lacunary,
    build_regular,
)
from radezero.corpus import seeded_case
from radezero.errors import RadezeroError
from radezero.evaluate import TINY_MODULUS, grid_angles, grid_values
from radezero.experiments import (
    config_hash,
    resolve_weight,
    run_campaign,
    run_expectation_bruteforce,
)
from radezero.jensen import jensen_residual
from radezero.ladders import build_ladder, generalized_ladder
from radezero.profile import CoefficientProfile, normalize, radial_frame
from radezero.sampling import FAMILIES, SignAssignment, sample_signs
from radezero.zeros import count_zeros_winding, locate_with_retry

# error classes worth advertising per subcommand, for --help
_ERRORS = {
    "profile": "TooFewTerms, Saturated",
    "radial": "DegenerateGroup, Saturated",
    "trace": "Saturated, DegenerateGroup",
    "zeros": "ZeroNearCircle, RootFindingFailure, NoConvergence, Saturated",
    "jensen": "NoConvergence, ZeroNearCircle, RootFindingFailure, Saturated",
    "ladder": "Saturated, NotConvex, OutOfRange",
    "construct": "ConstructionFailed, NotCentralDominant, OverflowGuard",
    "experiment": "TooLarge, Saturated, ZeroNearCircle, RootFindingFailure",
    "oracle": "TooLarge, ZeroNearCircle, RootFindingFailure",
}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; the contract reserves 2
    # for numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    """Bad inputs discovered after flag parsing (missing file, bad JSON)."""


def _seed_type(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"seed must be a decimal or 0x hex integer, got {text!r}"
        )


def _u_grid_type(text: str) -> list:
    """A radius grid: "3.0", "1,2,3", or inclusive "start:stop:step"."""
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0.0:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9))
            return [start + i * step for i in range(max(n, 0) + 1)]
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a number, a comma list, or start:stop:step, got {text!r}"
        )


def _float_list_type(text: str):
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}")


def _load_json(path_text: str) -> dict:
    """Read a JSON file; bare names fall back to the packaged configs."""
    p = Path(path_text)
    if not p.exists() and os.sep not in path_text:
        packaged = resources.files("radezero") / "configs" / path_text
        if packaged.is_file():
            return json.loads(packaged.read_text())
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path_text}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path_text} is not valid JSON: {exc}")


def _load_profile(path_text: str) -> CoefficientProfile:
    data = _load_json(path_text)
    try:
        return CoefficientProfile.from_json_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad profile spec in {path_text}: {exc}")


def _profile_json_dict(p: CoefficientProfile) -> dict:
    """A dict from_json_dict accepts back; rule families stay compact."""
    if p.family in ("factorial", "regular", "lacunary", "central-dominant"):
        return {"family": p.family, "k_max": p.k_max, "params": dict(p.params)}
    rows = [
        [float(lm) if math.isfinite(lm) else None, float(ph)]
        for lm, ph in zip(p.log_mag, p.phase)
    ]
    return {"family": "explicit", "k_max": p.k_max, "params": {}, "coefficients": rows}


def _env_seed():
    text = os.environ.get("RADEZERO_SEED")
    if text is None:
        return None
    try:
        return int(text, 0)
    except ValueError:
        raise UsageError(f"RADEZERO_SEED must be a decimal or 0x hex integer, got {text!r}")


def _effective_seed(args) -> int:
    env = _env_seed()
    return args.seed if env is None else env


def _draw_signs(profile: CoefficientProfile, args) -> SignAssignment:
    return sample_signs(profile.k_max, _effective_seed(args), args.family)


def _signs_json(sa: SignAssignment) -> list:
    if sa.family == "rademacher":
        return [int(x.real) for x in sa.signs]
    return [[float(x.real), float(x.imag)] for x in sa.signs]


@contextmanager
def _out_stream(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _dump_json(obj, path) -> None:
    with _out_stream(path) as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def _dump_csv(header, rows, path) -> None:
    with _out_stream(path) as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


# -- subcommand bodies ------------------------------------------------------


def _cmd_profile(args) -> int:
    data = _load_json(args.profile)
    if args.k_max is not None:
        if data.get("family") == "explicit":
            raise UsageError("--k-max only extends rule-backed families")
        data = dict(data, k_max=args.k_max)
    try:
        prof = CoefficientProfile.from_json_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad profile spec in {args.profile}: {exc}")
    if args.normalize:
        prof = normalize(prof).profile
        out = _profile_json_dict(prof)
    elif args.explicit:
        rows = [
            [float(lm) if math.isfinite(lm) else None, float(ph)]
            for lm, ph in zip(prof.log_mag, prof.phase)
        ]
        out = {"family": "explicit", "k_max": prof.k_max, "params": {}, "coefficients": rows}
    else:
        out = _profile_json_dict(prof)
    _dump_json(out, args.out)
    return 0


def _cmd_radial(args) -> int:
    prof = _load_profile(args.profile)
    rows = []
    for u in args.u:
        fr = radial_frame(prof, u, args.eps_tail)
        rows.append((u, fr.log_sigma, fr.s, fr.log_mu, fr.nu))
    _dump_csv(("u", "log_sigma", "s", "log_mu", "nu"), rows, args.out)
    return 0


def _cmd_trace(args) -> int:
    prof = _load_profile(args.profile)
    sa = _draw_signs(prof, args)
    u = args.u[0] if len(args.u) == 1 else None
    if u is None:
        raise UsageError("trace takes a single radius, not a grid")
    thetas = grid_angles(args.nodes)
    vals = grid_values(prof, sa, u, args.nodes)
    xs = np.log(np.maximum(np.abs(vals), TINY_MODULUS))
    rows = [
        (float(t), float(v.real), float(v.imag), float(x))
        for t, v, x in zip(thetas, vals, xs)
    ]
    _dump_csv(("theta", "re_f_hat", "im_f_hat", "x"), rows, args.out)
    if args.signs_out:
        _dump_json(_signs_json(sa), args.signs_out)
    return 0


def _cmd_zeros(args) -> int:
    prof = _load_profile(args.profile)
    sa = _draw_signs(prof, args)
    u = args.u[0] if len(args.u) == 1 else None
    if u is None:
        raise UsageError("zeros takes a single radius, not a grid")
    if args.method == "winding":
        report = count_zeros_winding(prof, sa, u, full=True)
    else:
        report = locate_with_retry(prof, sa, u)
    _dump_json(report.to_json_dict(), args.out)
    if args.signs_out:
        _dump_json(_signs_json(sa), args.signs_out)
    return 0


def _cmd_jensen(args) -> int:
    seed = _effective_seed(args)
    rows = []
    for tag in range(args.cases):
        case = seeded_case(seed, tag=tag)
        residual, info = jensen_residual(
            case.profile, case.signs, case.u, tol=args.tol, full=True
        )
        rows.append((tag, residual, info["margin"], info["panels"]))
    _dump_csv(("case", "residual", "margin", "panels"), rows, args.out)
    return 0


def _cmd_ladder(args) -> int:
    prof = _load_profile(args.profile)
    if args.lambdas is not None:
        ladder = generalized_ladder(prof, args.lambdas)
    else:
        ladder = build_ladder(prof, args.mode, k_min=args.k_min, k_max=args.k_max)
    _dump_json(ladder.to_json_dict(), args.out)
    return 0


def _cmd_construct(args) -> int:
    if args.kind == "regular":
        if args.delta is None or args.alpha is None:
            raise UsageError("construct regular needs --delta and --alpha")
        prof = build_regular(args.delta, args.alpha, args.k_max)
        out = _profile_json_dict(prof)
    elif args.kind == "central-dominant":
        if args.count is None:
            raise UsageError("construct central-dominant needs --count")
        built = build_central_dominant(
            k_margin=args.k_margin, count=args.count, growth=args.growth
        )
        out = _profile_json_dict(built.profile)
        out["schedule"] = [[u_k, k] for u_k, k in built.schedule]
    else:  # lacunary
        if args.lambdas is None or args.rhos is None:
            raise UsageError("construct lacunary needs --lambdas and --rhos")
        prof = build_lacunary([int(x) for x in args.lambdas], args.rhos)
        out = _profile_json_dict(prof)
    _dump_json(out, args.out)
    return 0


def _cmd_experiment(args) -> int:
    config = _load_json(args.config)
    env = _env_seed()
    if env is not None:
        config["seed"] = env
    report = run_campaign(config, jobs=args.jobs)
    stem = Path(args.config).stem
    prefix = args.out_prefix or f"{stem}_{config_hash(config)}"
    json_path, csv_path = prefix + ".json", prefix + ".csv"
    with open(json_path, "w") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    report.write_csv(csv_path)
    print(json_path)
    print(csv_path)
    return 0


def _cmd_oracle(args) -> int:
    prof = _load_profile(args.profile)
    u = args.u[0] if len(args.u) == 1 else None
    if u is None:
        raise UsageError("oracle takes a single radius, not a grid")
    phi = resolve_weight(args.phi) if args.phi else None
    out = run_expectation_bruteforce(prof, u, phi=phi, pin_first=not args.no_pin)
    _dump_json(out, args.out)
    return 0


# -- parser assembly --------------------------------------------------------


def _add_common(sp, profile=True, out=True):
    if profile:
        sp.add_argument(
            "--profile", required=True, metavar="JSON",
            help="profile spec file (or a packaged config name)",
        )
    if out:
        sp.add_argument("--out", default="-", metavar="PATH", help="output file, - for stdout")


def _add_seed(sp):
    sp.add_argument("--seed", type=_seed_type, default=0, help="decimal or 0x hex")
    sp.add_argument("--family", choices=sorted(FAMILIES), default="rademacher")


def _sub(subparsers, name, summary):
    sp = subparsers.add_parser(
        name,
        help=summary,
        description=summary,
        epilog=f"numerical failures (exit 2): {_ERRORS[name]}",
    )
    sp.set_defaults(handler=globals()[f"_cmd_{name}"])
    return sp


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="radezero",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = _sub(subparsers, "profile", "materialize or normalize a coefficient profile")
    _add_common(sp)
    sp.add_argument("--k-max", type=int, help="extend a rule-backed family to this degree")
    sp.add_argument("--normalize", action="store_true", help="emit the normal form")
    sp.add_argument("--explicit", action="store_true", help="force explicit coefficients")

    sp = _sub(subparsers, "radial", "sigma, s, maximal term, central index along a radius grid")
    _add_common(sp)
    sp.add_argument("--u", type=_u_grid_type, required=True, metavar="GRID",
                    help="radius grid: u value, comma list, or start:stop:step")
    sp.add_argument("--eps-tail", type=float, default=1e-12)

    sp = _sub(subparsers, "trace", "normalized boundary values on one circle")
    _add_common(sp)
    _add_seed(sp)
    sp.add_argument("--u", type=_u_grid_type, required=True, metavar="U")
    sp.add_argument("--nodes", type=int, default=1024)
    sp.add_argument("--signs-out", metavar="PATH", help="dump the drawn signs as JSON")

    sp = _sub(subparsers, "zeros", "count and locate zeros in a closed disk")
    _add_common(sp)
    _add_seed(sp)
    sp.add_argument("--u", type=_u_grid_type, required=True, metavar="U")
    sp.add_argument("--method", choices=("roots", "winding"), default="roots")
    sp.add_argument("--signs-out", metavar="PATH", help="dump the drawn signs as JSON")

    sp = _sub(subparsers, "jensen", "Jensen identity residuals over a seeded corpus")
    _add_common(sp, profile=False)
    sp.add_argument("--seed", type=_seed_type, default=0, help="decimal or 0x hex")
    sp.add_argument("--cases", type=int, default=100)
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = _sub(subparsers, "ladder", "exceptional-set ladder with certificates")
    _add_common(sp)
    sp.add_argument("--mode", choices=("thm1", "thm2"), default="thm1")
    sp.add_argument("--k-min", type=int, default=2)
    sp.add_argument("--k-max", type=int, default=10)
    sp.add_argument("--lambdas", type=_float_list_type, metavar="LIST",
                    help="build the generalized ladder on these s targets instead "
                         "(lambda_1 > 1, convex)")

    sp = _sub(subparsers, "construct", "build a profile with prescribed zero behavior")
    _add_common(sp, profile=False)
    sp.add_argument("--kind", choices=("regular", "central-dominant", "lacunary"), required=True)
    sp.add_argument("--delta", type=float, help="regular: growth exponent")
    sp.add_argument("--alpha", type=float, help="regular: log-power correction")
    sp.add_argument("--k-max", type=int, default=64, help="regular: truncation degree")
    sp.add_argument("--count", type=int, help="central-dominant: zeros to schedule")
    sp.add_argument("--k-margin", type=float, default=4.0, help="central-dominant: domination factor")
    sp.add_argument("--growth", type=float, default=16.0, help="central-dominant: radius ratio")
    sp.add_argument("--lambdas", type=_float_list_type, metavar="LIST", help="lacunary: exponents")
    sp.add_argument("--rhos", type=_float_list_type, metavar="LIST", help="lacunary: crossover radii")

    sp = _sub(subparsers, "experiment", "run a campaign config, write a CSV + JSON report pair")
    sp.add_argument("--config", required=True, metavar="JSON",
                    help="campaign config file (or a packaged config name)")
    sp.add_argument("--jobs", type=int, default=os.cpu_count(),
                    help="worker processes (default: logical cores)")
    sp.add_argument("--out-prefix", metavar="PREFIX",
                    help="output basename (default: config stem + config hash)")

    sp = _sub(subparsers, "oracle", "exact sign-ensemble statistics by enumeration")
    _add_common(sp)
    sp.add_argument("--u", type=_u_grid_type, required=True, metavar="U")
    sp.add_argument("--phi", choices=("one", "half-cos", "half-sin"),
                    help="also enumerate the weighted count under this weight")
    sp.add_argument("--no-pin", action="store_true",
                    help="enumerate all 2^K sign vectors instead of pinning the first")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except RadezeroError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"radezero {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        # parameter validation raised inside a module, or an unwritable output
        print(f"radezero {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
