"""
Bid Curve Engine - Main Entry Point

Command-line front end: fit, recommend, compare and simulate.

    python -m app.main simulate --output out/ --seed 7
    python -m app.main fit --input out/observations.csv --output out/
    python -m app.main recommend --input out/observations.csv --output out/ --budget 50
    python -m app.main compare --input out/observations.csv --output out/ --models sigmoid,li,nns
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from app import __version__
from app.cli.commands import run
from app.config import load_settings
from app.errors import BidCurveError
from app.models.fit import ModelKind
from app.models.manifest import Command, RunManifest
from app.models.recommendation import Strategy

logger = logging.getLogger(__name__)

EXIT_CAMPAIGN_ERRORS = 1
EXIT_USAGE = 2


def _models(text: str) -> List[ModelKind]:
    try:
        return [ModelKind(name.strip()) for name in text.split(",") if name.strip()]
    except ValueError:
        choices = ",".join(k.value for k in ModelKind)
        raise argparse.ArgumentTypeError(f"unknown model in {text!r}; choose from {choices}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bidcurve",
        description="Fit click-vs-cost curves and recommend budget-feasible bids.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for command in Command:
        cmd = sub.add_parser(command.value)
        if command is not Command.SIMULATE:
            cmd.add_argument("--input", required=True, help="Observation CSV")
        cmd.add_argument("--output", required=True, help="Output directory")
        cmd.add_argument("--config", default=None, help="TOML config file (fallback: BIDCURVE_CONFIG)")
        cmd.add_argument("--seed", type=int, default=None)
        if command is Command.RECOMMEND:
            cmd.add_argument("--budget", type=float, required=True)
            cmd.add_argument("--strategy", choices=[s.value for s in Strategy], default=None)
        if command in (Command.FIT, Command.COMPARE):
            cmd.add_argument("--models", type=_models, default=None, help="Comma-separated model kinds")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns the process exit status."""
    load_dotenv()
    args = build_parser().parse_args(argv)

    try:
        settings = load_settings(args.config)
    except (BidCurveError, ValidationError) as e:
        logging.basicConfig(level=logging.ERROR)
        logger.error(f"❌ Invalid configuration: {e}")
        return EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    command = Command(args.command)
    models = getattr(args, "models", None)
    if models is None:
        models = list(settings.compare.models) if command is Command.COMPARE else [ModelKind.SIGMOID]

    try:
        manifest = RunManifest(
            command=command,
            input_path=getattr(args, "input", None),
            output_path=args.output,
            config_path=settings.config,
            budget=getattr(args, "budget", None),
            strategy=getattr(args, "strategy", None) or settings.recommend.strategy,
            models=models,
            seed=args.seed,
        )
    except ValidationError as e:
        logger.error(f"❌ Invalid arguments: {e}")
        return EXIT_USAGE

    try:
        return run(manifest, settings)
    except BidCurveError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
