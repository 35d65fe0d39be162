"""
Main entry point for the relay AoI scheduling toolkit
"""
import argparse
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from experiments.config import load_config
from experiments.runner import ExperimentRunner
from logger import LOGGER_NAME, setup_logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Age-of-Information scheduling for a two-source, two-hop relay'
    )

    parser.add_argument(
        '--mode',
        choices=['solve', 'simulate', 'sweep', 'inspect'],
        required=True,
        help='Operation mode'
    )

    parser.add_argument(
        '--config',
        type=str,
        default='config.yaml',
        help='Path to configuration file'
    )

    parser.add_argument(
        '--set',
        dest='overrides',
        action='append',
        default=[],
        metavar='SECTION.KEY=VALUE',
        help='Override a config value (repeatable), e.g. --set params.gamma_max=1.8'
    )

    parser.add_argument(
        '--policy',
        type=str,
        help='Policy file, or one of idle/alternate/greedy/lower-bound (simulate, inspect)'
    )

    parser.add_argument(
        '--component',
        choices=['alpha', 'beta'],
        default='beta',
        help='Action component to slice (inspect mode)'
    )

    parser.add_argument(
        '--fixed',
        type=str,
        default='',
        help='Fixed coordinates, e.g. "theta1=1,theta2=2,x1=0,x2=1" (inspect mode)'
    )

    parser.add_argument(
        '--free',
        type=str,
        default='y1,y2',
        help='The two free coordinates, e.g. "y1,y2" (inspect mode)'
    )

    return parser


def main(argv: Optional[List[str]] = None):
    args = build_parser().parse_args(argv)

    load_dotenv()
    config = load_config(args.config, args.overrides)
    logger = setup_logger(config.raw)
    runner = ExperimentRunner(config, logger)

    if args.mode == 'solve':
        _, paths = runner.solve()
        for label, path in paths.items():
            logger.info(f"  {label}: {path}")

    elif args.mode == 'simulate':
        if not args.policy:
            raise ValueError("--policy is required in simulate mode")
        runner.simulate(args.policy)

    elif args.mode == 'sweep':
        runner.sweep()

    elif args.mode == 'inspect':
        if not args.policy:
            raise ValueError("--policy is required in inspect mode")
        runner.inspect(args.policy, args.fixed, args.free, args.component)


def run(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and translate failures into exit status 1"""
    try:
        main(argv)
    except KeyboardInterrupt:
        print("\n\nInterrupted by user")
        return 1
    except Exception as e:
        logging.getLogger(LOGGER_NAME).error(f"Error: {e}")
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(run())
