"""
CLI module for the coxeter-saito tool.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

from .appendix import appendix_report
from .catalog import GroupSpec, check_invariance, classify, degree_inequality_table, group_from_name
from .flat import classify_report, flat_report
from .geometry import ass3_check, flatness_check, orbit_geometry, torsion_check
from .parser import format_value, load_group_spec
from .report import Check, Report, emit_report, format_rational, matrix_to_rows, polys_to_strings, tensor_to_dict, write_report
from .saito import (
    FrameCalculus,
    almost_saito_checks,
    check_round_trip,
    cs_ass,
    dualize_ass_to_ss,
    natural_ass,
    run_axiom_sets,
    saito_checks,
    select_axiom_sets,
    theorem2_compare,
)
from .utils import (
    ALLOWED_COMMANDS,
    ALLOWED_EXPECTATIONS,
    ALLOWED_FORMATS,
    AlgebraError,
    DEFAULT_MAX_DEGREE,
    InputError,
    parse_axiom_sets,
    set_max_degree,
)

logger = logging.getLogger(__name__)


@dataclass
class CommandConfig:
    """Everything one CLI invocation needs."""

    command: str
    group: Optional[str] = None
    spec: Optional[str] = None
    output: Optional[str] = None
    format: str = "json"
    axioms: Optional[str] = None
    expect: str = "same"
    max_degree: Optional[int] = DEFAULT_MAX_DEGREE
    m: Optional[int] = None
    n: Optional[int] = None

    @property
    def group_label(self) -> str:
        if self.command == "appendix":
            return f"G{self.m}_1_{self.n}"
        return self.group or self.spec or ""


def setup_logging(verbose: bool = False) -> None:
    """
    Setup logging configuration.

    Args:
        verbose: Enable verbose logging
    """
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stderr)
        ]
    )


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse command line arguments.

    Args:
        argv: Argument list, sys.argv[1:] when None

    Returns:
        Parsed arguments namespace
    """
    parser = argparse.ArgumentParser(
        description="Coxeter-Saito - exact Saito structures on orbit spaces of Coxeter and Shephard groups",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Degrees and classification of a catalog group
  coxeter-saito catalog --group B3

  # Compare the two connections; Shephard groups are expected to differ
  coxeter-saito compare --group G3_1_2 --expect differ

  # Flat coordinates of a group read from a spec file, as text
  coxeter-saito flat --spec g312.json --format text

  # Axiom checks for selected structures
  coxeter-saito verify --group Z5 --axioms ass-natural,af-cs

  # Closed forms for G(3,1,2) against oracles
  coxeter-saito appendix --m 3 --n 2
        """
    )

    parser.add_argument(
        'command',
        choices=sorted(ALLOWED_COMMANDS),
        help='Command to run: ' + ', '.join(sorted(ALLOWED_COMMANDS))
    )

    parser.add_argument(
        '--group',
        help='Catalog group name, e.g. Z5, A2, B3, D4, I2_5, G3_1_2, G3_3_3'
    )

    parser.add_argument(
        '--spec',
        help='Path to a JSON group spec (or an inline JSON object)'
    )

    parser.add_argument(
        '--out',
        help='Write the report to this file instead of stdout'
    )

    parser.add_argument(
        '--format',
        default='json',
        help='Report format: json or text (default: json)'
    )

    parser.add_argument(
        '--axioms',
        help='Comma separated axiom sets for verify. Defaults to all. Allowed: ass-natural, ass-cs, ss-natural, ss-cs, af-cs, f-cs'
    )

    parser.add_argument(
        '--expect',
        default='same',
        help='For compare: "same" passes when the connections agree, "differ" when they do not (default: same)'
    )

    parser.add_argument(
        '--max-degree',
        type=int,
        default=DEFAULT_MAX_DEGREE,
        help=f'Abort when an intermediate polynomial exceeds this total degree (default: {DEFAULT_MAX_DEGREE})'
    )

    parser.add_argument(
        '--m',
        type=int,
        help='Order parameter m for the appendix command'
    )

    parser.add_argument(
        '--n',
        type=int,
        help='Rank parameter n for the appendix command'
    )

    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Enable verbose logging'
    )

    return parser.parse_args(argv)


def validate_arguments(args: argparse.Namespace) -> None:
    """
    Validate command line arguments.

    Args:
        args: Parsed arguments

    Raises:
        ValueError: If arguments are invalid
    """
    if args.command not in ALLOWED_COMMANDS:
        raise ValueError(f"Invalid command: {args.command}")

    if args.command == "appendix":
        if args.m is None or args.n is None:
            raise ValueError("appendix needs both --m and --n")
        if args.m < 3 or args.n < 2:
            raise ValueError("appendix needs m >= 3 and n >= 2")
    elif bool(args.group) == bool(args.spec):
        raise ValueError("Exactly one of --group and --spec is required")

    if args.spec and not args.spec.lstrip().startswith("{") and not Path(args.spec).exists():
        raise ValueError(f"Spec file not found: {args.spec}")

    if args.format not in ALLOWED_FORMATS:
        raise ValueError(f"Invalid format: {args.format}. Allowed formats: {list(ALLOWED_FORMATS)}")

    if args.expect not in ALLOWED_EXPECTATIONS:
        raise ValueError(f"Invalid expectation: {args.expect}. Allowed: {list(ALLOWED_EXPECTATIONS)}")

    if args.max_degree is not None and args.max_degree < 1:
        raise ValueError("max_degree must be a positive integer")

    if args.axioms is not None:
        if not args.axioms.strip():
            raise ValueError("Axioms cannot be empty")
        parse_axiom_sets(args.axioms)


def build_config(args: argparse.Namespace) -> CommandConfig:
    return CommandConfig(
        command=args.command,
        group=args.group,
        spec=args.spec,
        output=args.out,
        format=args.format,
        axioms=args.axioms,
        expect=args.expect,
        max_degree=args.max_degree,
        m=args.m,
        n=args.n,
    )


def load_group(config: CommandConfig) -> GroupSpec:
    """Build the group from --group or --spec."""
    if config.group:
        return group_from_name(config.group)
    return load_group_spec(config.spec)


def _catalog_report(g: GroupSpec) -> Report:
    report = Report(group=g.name, command="catalog")
    failure = check_invariance(g)
    report.add(Check("catalog:invariance", failure is None, failure or "invariants fixed by every generator"))
    verdict = classify(g)
    table = degree_inequality_table(g)
    if verdict["is_cs"] and verdict["distinct_degrees"]:
        bad = table[~table["consistent"]]
        detail = "" if bad.empty else f"fails at ({int(bad.iloc[0]['alpha'])},{int(bad.iloc[0]['beta'])})"
        report.add(Check("catalog:degree-inequalities", bad.empty, detail))
    report.data = {
        "rank": g.rank,
        "family": g.family,
        "variables": list(g.variables),
        "invariants": polys_to_strings(g.invariants),
        "degrees": list(g.degrees),
        "codegrees": None if g.codegrees is None else list(g.codegrees),
        "classification": verdict,
        "degree_table": [
            {key: value.item() if hasattr(value, "item") else value for key, value in row.items()}
            for row in table.to_dict(orient="records")
        ],
    }
    return report


def _vector_to_strings(v) -> List[str]:
    return [format_value(value) for value in v]


def _geometry_report(g: GroupSpec) -> Report:
    verdict = classify(g)
    geo = orbit_geometry(g, with_hessian=verdict["is_cs"])
    report = Report(group=g.name, command="geometry")
    data = {
        "degrees": list(g.degrees),
        "J": matrix_to_rows(geo.jacobian.J),
        "det_J": format_value(geo.jacobian.detJ),
        "e": _vector_to_strings(geo.efield.e),
        "Q": matrix_to_rows(geo.efield.Q),
        "det_Q": format_value(geo.efield.detQ),
        "E": _vector_to_strings(geo.euler.E),
    }
    if geo.hessian is not None:
        hm = geo.hessian
        report.add(torsion_check(hm.Stilde, "cs:torsion"))
        report.add(flatness_check(hm.Stilde, "cs:flatness"))
        report.add(ass3_check(g, hm, check_id="cs:ASS3"))
        data.update({
            "H": matrix_to_rows(hm.Htilde),
            "det_H": format_value(hm.detH),
            "S": tensor_to_dict(hm.Stilde),
        })
    report.data = data
    return report


def _ass_report(g: GroupSpec, command: str) -> Report:
    geo = orbit_geometry(g, with_hessian=command == "cs")
    ass = natural_ass(geo) if command == "natural" else cs_ass(geo)
    ss = dualize_ass_to_ss(ass)
    fc = FrameCalculus(g.ring, g.rank)
    report = Report(group=g.name, command=command)
    report.extend(almost_saito_checks(ass, fc))
    report.extend(saito_checks(ss, fc))
    report.add(check_round_trip(ass))
    report.data = {
        "r": format_rational(ass.r),
        "Btilde": tensor_to_dict(ass.mult.matrices),
        "connection": tensor_to_dict(ass.connection),
        "ss_C": tensor_to_dict(ss.mult.matrices),
        "ss_connection": tensor_to_dict(ss.connection),
    }
    return report


def _compare_report(g: GroupSpec, expect: str) -> Report:
    geo = orbit_geometry(g, with_hessian=True)
    natural = natural_ass(geo).mult
    cs = cs_ass(geo).mult
    result = theorem2_compare(g, natural, geo.hessian, cs)
    report = Report(group=g.name, command="compare")
    report.add(Check(
        "compare:multiplications",
        result.multiplications_equal,
        "" if result.multiplications_equal else f"differ at {result.multiplication_witness}",
    ))
    wanted = expect == "same"
    detail = "connections agree" if result.connections_equal else f"differ at (i,j,k) = {result.connection_witness}"
    report.add(Check(f"compare:connections-{expect}", result.connections_equal == wanted, detail))
    report.data = {
        "multiplications_equal": result.multiplications_equal,
        "connections_equal": result.connections_equal,
        "multiplication_witness": None if result.multiplication_witness is None else list(result.multiplication_witness),
        "connection_witness": None if result.connection_witness is None else list(result.connection_witness),
        "ratio": format_rational(result.ratio),
        "expect": expect,
    }
    return report


def _verify_report(g: GroupSpec, axioms: Optional[str]) -> Report:
    report = Report(group=g.name, command="verify")
    report.extend(run_axiom_sets(g, axioms))
    report.data = {"axioms": select_axiom_sets(g, axioms)}
    return report


def dispatch(config: CommandConfig) -> Report:
    """Run one command and return its report."""
    if config.command == "appendix":
        return appendix_report(config.m, config.n)
    g = load_group(config)
    if config.command == "catalog":
        return _catalog_report(g)
    if config.command == "geometry":
        return _geometry_report(g)
    if config.command in ("natural", "cs"):
        return _ass_report(g, config.command)
    if config.command == "compare":
        return _compare_report(g, config.expect)
    if config.command == "flat":
        return flat_report(g)
    if config.command == "classify":
        return classify_report(g)
    if config.command == "verify":
        return _verify_report(g, config.axioms)
    raise InputError(f"Invalid command: {config.command}")


def run(config: CommandConfig) -> Tuple[int, Report]:
    """
    Run a command with exit-code semantics.

    Returns:
        (exit code, report): 0 when every check passes, 1 on a failed check
        or an algebra error, 2 on bad input
    """
    set_max_degree(config.max_degree)
    try:
        report = dispatch(config)
    except (InputError, ValueError) as e:
        logger.error(f"Invalid input: {str(e)}")
        report = Report(group=config.group_label, command=config.command)
        report.add(Check("input", False, str(e)))
        return 2, report
    except (AlgebraError, ZeroDivisionError) as e:
        logger.error(f"Computation failed: {str(e)}")
        report = Report(group=config.group_label, command=config.command)
        report.add(Check(f"error:{type(e).__name__}", False, str(e)))
        return 1, report
    code = 0 if report.all_passed else 1
    logger.info(f"{config.command} for {report.group}: {len(report.checks)} checks, {len(report.failures())} failed")
    return code, report


def main(argv: Optional[List[str]] = None):
    """Main CLI entry point."""
    try:
        args = parse_arguments(argv)
        setup_logging(args.verbose)

        try:
            validate_arguments(args)
        except ValueError as e:
            logger.error(f"Invalid arguments: {str(e)}")
            sys.exit(2)

        config = build_config(args)
        logger.info(f"Running {config.command} for {config.group_label}")
        code, report = run(config)
        write_report(emit_report(report, config.format), config.output)
        sys.exit(code)

    except KeyboardInterrupt:
        logger.info("Process interrupted by user")
        sys.exit(1)
    except Exception as e:
        logger.error(f"Process failed: {str(e)}")
        sys.exit(1)


if __name__ == "__main__":
    main()
