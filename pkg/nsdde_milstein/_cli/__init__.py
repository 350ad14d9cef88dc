"""Command line interface, `nsdde <subcommand> [flags]`. The subcommand comes first,
only `--verbose` and `--help` may precede it. E.g.

```
nsdde convergence --problem linear-sdde --m-exps 3..8 --ref-exp 11 --paths 1000
nsdde check --problem cubic-tamed --radius 10
nsdde simulate --config conv.manifest.yml --scheme tamed-milstein --m-exp 6
```
"""

import logging
import sys
from typing import List, Optional

from .._utils.exceptions import BadFlag, NsddeError
from .commands import COMMANDS, EXIT_INVALID, run_command
from .config import _ArgumentParser, parse_config, print_config_error

LOGGER = logging.getLogger(__name__)


def _command_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="nsdde",
        description="Tamed Milstein experiments for neutral stochastic delay "
        "differential equations.",
    )
    parser.add_argument("subcommand", choices=list(COMMANDS))
    parser.add_argument(
        "--verbose", action="store_true", help="Log progress at INFO level"
    )
    return parser


def _check_subcommand_first(argv: List[str]) -> None:
    for token in argv:
        if token in ("--verbose", "-h", "--help"):
            continue
        if token not in COMMANDS:
            raise BadFlag(
                f"Expected a subcommand ({', '.join(COMMANDS)}) before '{token}'. "
                "The subcommand must come first, e.g. "
                "nsdde simulate --problem cubic-tamed --m-exp 6."
            )
        return


def main(argv: Optional[List[str]] = None) -> int:
    try:
        _check_subcommand_first(sys.argv[1:] if argv is None else argv)
        args, remaining = _command_parser().parse_known_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        config = parse_config(remaining)
        return run_command(args.subcommand, config)
    except NsddeError as exc:
        print_config_error(exc)
        return EXIT_INVALID
