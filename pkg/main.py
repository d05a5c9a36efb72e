"""qflift command-line entry point."""

import argparse
import logging
import sys

from cli import load_settings, resolve_config, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qflift",
        description="Representation counts of squares by diagonal quadratic forms via Shimura lifts",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="no progress bar")
    parser.add_argument("--catalog", help="catalog file (default: $QFLIFT_CATALOG, then the bundled one)")
    parser.add_argument("--out", help="write output here instead of stdout")
    parser.add_argument("--format", choices=("text", "csv", "human"), help="report format")
    sub = parser.add_subparsers(dest="command", required=True)

    expand = sub.add_parser("expand", help="q-expansion of a catalog form or a theta product")
    expand.add_argument("--form", help="catalog name, e.g. Delta_4_8, E4 or E4@2")
    expand.add_argument("--qf", help="form in multiplicity notation, e.g. 1^4,2")
    expand.add_argument("--upto", type=int, default=20)

    lift = sub.add_parser("lift", help="Shimura lift of a theta product, solved in its basis")
    lift.add_argument("--qf", required=True)
    lift.add_argument("--twist", type=int, default=1)
    lift.add_argument("--upto", type=int, default=20)
    lift.add_argument("--assume-conjecture", action="store_true",
                      help="allow lifts whose mapping property is only conjectured")

    verify = sub.add_parser("verify", help="check tables, corollaries, relations and congruences")
    verify.add_argument("--scope", default="all",
                        help="all, tables, corollaries, relations, table:ID, cor:ID, relations:SET, "
                             "equivalences, congruences, newforms, conjecture or search")
    verify.add_argument("--nmax", type=int)
    verify.add_argument("--pmax", type=int)
    verify.add_argument("--mmax", type=int)
    verify.add_argument("--lambda-max", dest="lambda_max", type=int)
    verify.add_argument("-j", "--jobs", type=int, help="concurrent verification tasks")

    sub.add_parser("tables", help="regenerate every lift table and diff against the shipped ones")
    return parser


def main(argv=None) -> int:
    """Main application entry point."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = resolve_config(args, load_settings())
    except ValueError as e:
        logging.getLogger(__name__).error("%s", e)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
