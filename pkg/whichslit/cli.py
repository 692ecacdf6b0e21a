"""
Command line interface for whichslit.

Exit status: 0 on success, 1 when a verification or a required search fails, 2 on
malformed input. Summaries go to standard output, artifacts to the ``--out`` files and
diagnostics to standard error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from whichslit import __version__
from whichslit.analysis.checker import ProblemInstance
from whichslit.analysis.families import FamilyTag
from whichslit.exceptions import InputError, WhichSlitError
from whichslit.lab import SELECTIONS, WhichSlitLab
from whichslit.schemas.codec import dump_check_report, dump_instance, validate_io, write_artifact
from whichslit.schemas.models import SCHEMA_VERSION
from whichslit.services.export import joint_frame, write_csv
from whichslit.services.screen import SCREEN_KINDS
from whichslit.utils.cache import Cache

logger = logging.getLogger("whichslit")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2

FAMILIES = [tag.value for tag in FamilyTag]


def _complex(re: Optional[float], im: Optional[float], default: complex = 1.0) -> complex:
    if re is None and im is None:
        return default
    return complex(re or 0.0, im or 0.0)


def _family_params(args) -> dict:
    return {
        "q": args.q,
        "p": args.p,
        "theta": args.theta,
        "lam": _complex(args.lambda_re, args.lambda_im),
        "mu": _complex(args.mu_re, args.mu_im),
        "seed": getattr(args, "seed", None),
    }


def _load_instance(lab: WhichSlitLab, args) -> ProblemInstance:
    if getattr(args, "instance", None):
        instance = validate_io(args.instance, strict=getattr(args, "strict", False))
        if not isinstance(instance, ProblemInstance):
            raise InputError(f"{args.instance} does not hold an instance")
        return instance
    if getattr(args, "family", None):
        return lab.family(args.family, mirror=getattr(args, "mirror", False), **_family_params(args))
    raise InputError("give either --instance PATH or --family NAME")


def cmd_verify(lab: WhichSlitLab, args) -> int:
    instance = validate_io(args.instance, strict=args.strict)
    if not isinstance(instance, ProblemInstance):
        raise InputError(f"{args.instance} does not hold an instance")
    result = lab.verify(instance, tol=args.tol)
    for name, condition in result.report.conditions.items():
        print(f"{name}: {'pass' if condition.passed else 'FAIL'} (residual {condition.residual:.3e})")
    if result.correlation is not None:
        print(f"correlation: {result.correlation.kind.value}")
    if result.case is not None:
        print(f"case: {result.case.label}")
    print(f"verdict: {'pass' if result.passed else 'FAIL'}")
    if args.out:
        write_artifact(dump_check_report(result.report, instance.family, result.correlation, result.case), args.out)
    return EXIT_OK if result.passed else EXIT_FAILURE


def cmd_family(lab: WhichSlitLab, args) -> int:
    instance = lab.family(args.name, mirror=args.mirror, **_family_params(args))
    write_artifact(dump_instance(instance), args.out)
    print(f"family {instance.family}: dim1={instance.layout.dim1}, dim2={instance.decomp.dim2} -> {args.out}")
    return EXIT_OK


def cmd_search(lab: WhichSlitLab, args) -> int:
    if args.cache:
        lab.cache = Cache(enabled=True)
    if args.instance:
        instance = validate_io(args.instance, strict=args.strict)
        if not isinstance(instance, ProblemInstance):
            raise InputError(f"{args.instance} does not hold an instance")
        model = lab.search(instance.psi, rank=args.rank, restarts=args.restarts, seed=args.seed, workers=args.workers)
        found = len(model.solutions)
        print(f"subspace dimension: {model.subspace_dimension}")
        if model.rejected_reason:
            print(f"rejected: {model.rejected_reason}")
    elif args.dim1 is not None:
        if args.dim1 != 2:
            raise InputError("--dim1 only supports the one-state-per-slit case, dim1 = 2")
        model = lab.one_state_search(args.trials, seed=args.seed, restarts=args.restarts, workers=args.workers)
        found = model.solutions_found
        print(f"exact argument: {'infeasible' if model.exact_infeasible else 'inconclusive'}")
        print(f"trials: {model.trials}")
        outcomes = ", ".join(f"{name} {count}" for name, count in sorted(model.outcomes.items()))
        print(f"outcomes: {outcomes}")
    else:
        raise InputError("give either --instance PATH or --dim1 2")
    print(f"solutions: {found}")
    if model.best_residual is not None:
        print(f"best residual: {model.best_residual:.3e}")
    write_artifact(model, args.out)
    return EXIT_FAILURE if args.require_solution and found == 0 else EXIT_OK


def cmd_simulate(lab: WhichSlitLab, args) -> int:
    instance = _load_instance(lab, args)
    frame, joint = lab.simulate(instance, select=args.select, n_bins=args.bins, kind=args.screen)
    write_csv(frame, args.out)
    if args.joint_out:
        write_csv(joint_frame(joint), args.joint_out)
    print(f"bins: {len(frame)}, max |cross_term|: {frame['cross_term'].abs().max():.3e}")
    return EXIT_OK


def cmd_sample(lab: WhichSlitLab, args) -> int:
    instance = _load_instance(lab, args)
    result, frame = lab.sample(instance, args.n, seed=args.sample_seed, workers=args.workers, n_bins=args.bins, kind=args.screen)
    write_csv(frame, args.out)
    marginal = ", ".join(f"{value:.4f}" for value in result.cavity_frequencies)
    print(f"runs: {result.n}, seed: {result.seed}, cavity frequencies: ({marginal})")
    return EXIT_OK


def cmd_screen_check(lab: WhichSlitLab, args) -> int:
    summary = lab.screen_check(args.dim1, n_bins=args.bins, kind=args.screen)
    for key, value in summary.items():
        print(f"{key}: {value}")
    return EXIT_OK


def _add_family_options(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("family parameters")
    group.add_argument("--q", type=float, help="q for dim4-sym")
    group.add_argument("--p", type=float, help="p for dim4-mu0 and dim6")
    group.add_argument("--theta", type=float, default=0.0, help="phase of the slit-crossing block (default: 0)")
    group.add_argument("--lambda-re", dest="lambda_re", type=float)
    group.add_argument("--lambda-im", dest="lambda_im", type=float)
    group.add_argument("--mu-re", dest="mu_re", type=float)
    group.add_argument("--mu-im", dest="mu_im", type=float)
    group.add_argument("--mirror", action="store_true", help="exchange the slits and cavities A<->C, B<->D")


def _add_screen_options(parser: argparse.ArgumentParser):
    parser.add_argument("--screen", choices=SCREEN_KINDS, default=None, help="screen propagator (default: dft)")
    parser.add_argument("--bins", type=int, default=None, help="number of screen bins (default: one per basis state)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whichslit",
        description="Verify, search and simulate non-disturbing which-slit detectors.",
    )
    parser.add_argument(
        "--version", action="version", version=f"whichslit {__version__} (schema {SCHEMA_VERSION})"
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging on standard error")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    # --- verify ---
    verify_parser = subparsers.add_parser("verify", help="Check conditions C1-C5 on an instance file")
    verify_parser.add_argument("instance", help="Instance JSON file")
    verify_parser.add_argument("--tol", type=float, default=None, help="equality tolerance")
    verify_parser.add_argument("--strict", action="store_true", help="reject non-normalized states")
    verify_parser.add_argument("--out", help="write the check report here")

    # --- family ---
    family_parser = subparsers.add_parser("family", help="Write a family member as an instance file")
    family_parser.add_argument("name", choices=FAMILIES)
    _add_family_options(family_parser)
    family_parser.add_argument("--seed", type=int, default=None, help="solver seed for dim4-general")
    family_parser.add_argument("--out", required=True, help="Output instance JSON")

    # --- search ---
    search_parser = subparsers.add_parser("search", help="Search projectors K for a fixed state")
    search_parser.add_argument("--instance", help="Instance JSON whose state is searched")
    search_parser.add_argument("--rank", type=int, default=None, help="target rank of K")
    search_parser.add_argument("--dim1", type=int, default=None, help="run the one-state-per-slit check (dim1 = 2)")
    search_parser.add_argument("--trials", type=int, default=100, help="random states for --dim1 2 (default: 100)")
    search_parser.add_argument("--restarts", type=int, default=None)
    search_parser.add_argument("--seed", type=int, default=None)
    search_parser.add_argument("--workers", type=int, default=None)
    search_parser.add_argument("--strict", action="store_true", help="reject non-normalized states")
    search_parser.add_argument("--require-solution", action="store_true", help="exit 1 when nothing is found")
    search_parser.add_argument("--cache", action="store_true", help="reuse cached solver reports")
    search_parser.add_argument("--out", required=True, help="Output report JSON")

    # --- simulate ---
    simulate_parser = subparsers.add_parser("simulate", help="Screen distributions as CSV")
    simulate_parser.add_argument("--instance", help="Instance JSON file")
    simulate_parser.add_argument("--family", choices=FAMILIES, help="build the instance from a family")
    _add_family_options(simulate_parser)
    simulate_parser.add_argument("--seed", type=int, default=None, help="solver seed for dim4-general")
    simulate_parser.add_argument("--strict", action="store_true")
    _add_screen_options(simulate_parser)
    simulate_parser.add_argument("--select", choices=SELECTIONS, default="none", help="selection for cross_term")
    simulate_parser.add_argument("--out", required=True, help="Output distribution CSV")
    simulate_parser.add_argument("--joint-out", dest="joint_out", help="Output joint cavity x bin CSV")

    # --- sample ---
    sample_parser = subparsers.add_parser("sample", help="Monte Carlo runs of the apparatus")
    sample_parser.add_argument("--instance", help="Instance JSON file")
    sample_parser.add_argument("--family", choices=FAMILIES, help="build the instance from a family")
    _add_family_options(sample_parser)
    sample_parser.add_argument("--seed", dest="sample_seed", type=int, default=None, help="sampler seed (default: 7)")
    sample_parser.add_argument("--strict", action="store_true")
    _add_screen_options(sample_parser)
    sample_parser.add_argument("--n", type=int, default=100000, help="number of runs (default: 100000)")
    sample_parser.add_argument("--workers", type=int, default=None)
    sample_parser.add_argument("--out", required=True, help="Output counts CSV")

    # --- screen-check ---
    screen_parser = subparsers.add_parser("screen-check", help="Validate a screen model")
    screen_parser.add_argument("--dim1", type=int, default=4)
    _add_screen_options(screen_parser)

    return parser


COMMANDS = {
    "verify": cmd_verify,
    "family": cmd_family,
    "search": cmd_search,
    "simulate": cmd_simulate,
    "sample": cmd_sample,
    "screen-check": cmd_screen_check,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command is None:
        parser.print_help()
        return EXIT_OK

    lab = WhichSlitLab()
    try:
        return COMMANDS[args.command](lab, args)
    except (InputError, ValidationError) as e:
        logger.error("%s", e)
        return EXIT_INPUT
    except WhichSlitError as e:
        logger.error("%s", e)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
