"""
Script to regenerate the packaged instance fixtures from the family builders.
Every fixture is verified before it is written.
"""

import argparse
import logging
from pathlib import Path

from whichslit.analysis.checker import check_problem
from whichslit.analysis.families import family_dim4_sym, family_dim6, sec6_instance
from whichslit.schemas.codec import dump_instance, write_artifact

logger = logging.getLogger("generate_fixtures")

FIXTURES = {
    "dim4_sym_q025.json": lambda: family_dim4_sym(0.25, 0.0),
    "dim4_sym_q010.json": lambda: family_dim4_sym(0.1, 0.0),
    "dim6_p025.json": lambda: family_dim6(0.25, 0.0),
    "dim6_p010.json": lambda: family_dim6(0.1, 0.0),
    "sec6.json": lambda: sec6_instance().instance,
}


def generate_fixtures(output_dir: Path):
    output_dir.mkdir(parents=True, exist_ok=True)
    for name, build in FIXTURES.items():
        instance = build()
        report = check_problem(instance)
        if not report.verdict:
            raise SystemExit(f"{name} fails {', '.join(report.failed())}")
        write_artifact(dump_instance(instance), output_dir / name)
        logger.info("wrote %s", output_dir / name)


def main():
    parser = argparse.ArgumentParser(description="Regenerate the packaged instance fixtures.")
    parser.add_argument(
        "--output-dir",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "whichslit" / "fixtures",
        help="Directory to write the fixture files",
    )
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    generate_fixtures(args.output_dir)


if __name__ == "__main__":
    main()
