#   Copyright Peznauts <kevin@cloudnull.com>. All Rights Reserved.
#
#   Licensed under the Apache License, Version 2.0 (the "License"); you may
#   not use this file except in compliance with the License. You may obtain
#   a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#   WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#   License for the specific language governing permissions and limitations
#   under the License.

import argparse
import os
import sys

import noma_rep

from noma_rep import ConfigError
from noma_rep import DomainError
from noma_rep import InfeasibleError
from noma_rep import InvalidLayoutError
from noma_rep import mixin


EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3

COMMANDS = {
    "outage-sweep": "Outage probability versus SNR, M, T or D",
    "fbl-sweep": "Finite blocklength average error versus R or n",
    "moment-check": "Moment match of the interference sum",
    "plan": "Plan per-layer thresholds and rates for a frame",
    "linklevel": "Symbol-level interleaved QPSK simulation",
    "sic-sim": "SIC frame simulation with error propagation",
}


def _common_args():
    """Return the parser holding the options shared by every command."""

    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        "--config",
        help="YAML experiment file. Default: %(default)s",
        metavar="STRING",
        default=os.getenv("NOMA_REP_CONFIG", None),
        type=str,
    )
    parser.add_argument(
        "--seed",
        help="Random seed. Default: %(default)s",
        metavar="INT",
        default=os.getenv("NOMA_REP_SEED", None),
        type=int,
    )
    parser.add_argument(
        "--trials",
        help="Monte Carlo trials per grid point. Default: %(default)s",
        metavar="INT",
        default=os.getenv("NOMA_REP_TRIALS", None),
        type=int,
    )
    parser.add_argument(
        "--workers",
        help="Worker processes. Default: %(default)s",
        metavar="INT",
        default=os.getenv("NOMA_REP_WORKERS", None),
        type=int,
    )
    parser.add_argument(
        "--out",
        help="Output file, stdout when unset. Default: %(default)s",
        metavar="STRING",
        default=None,
        type=str,
    )
    parser.add_argument(
        "--log-file",
        help="Enable a rotating log file. Default: %(default)s",
        metavar="STRING",
        default=os.getenv("NOMA_REP_LOG_FILE", None),
        type=str,
    )
    parser.add_argument(
        "--debug",
        help="Enable debug mode. Default: %(default)s",
        default=bool(os.getenv("NOMA_REP_DEBUG", False)),
        action="store_true",
    )
    return parser


def _args(exec_args=None):
    """Setup command line arguments."""

    common = _common_args()
    parser = argparse.ArgumentParser(
        description="Repetition-based NOMA outage and error toolkit.",
        prog="noma-rep",
        formatter_class=lambda prog: argparse.HelpFormatter(
            prog, max_help_position=32, width=128
        ),
    )
    parser.add_argument(
        "--version",
        action="version",
        version="%(prog)s {version}".format(version=noma_rep.__version__),
    )
    subparsers = parser.add_subparsers(
        help="Command sub-command help", dest="command"
    )
    subparsers.required = True
    for name, helptext in COMMANDS.items():
        sub = subparsers.add_parser(name, help=helptext, parents=[common])
        if name == "plan":
            sub.add_argument(
                "--format",
                help="Plan document format. Default: %(default)s",
                choices=["json", "yaml"],
                default=None,
            )

    if exec_args is not None:
        args = parser.parse_args(args=exec_args)
    else:
        args = parser.parse_args()

    return args, parser


def run(args):
    """Run one command and return its process exit status.

    :param args: Parsed arguments.
    :type args: Object
    :returns: Integer
    """

    try:
        _mixin = mixin.Mixin(args=args)
        result = _mixin.run()
    except (ConfigError, DomainError, InvalidLayoutError) as e:
        print("Configuration error: {}".format(e), file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as e:
        print("Infeasible: {}".format(e), file=sys.stderr)
        return EXIT_INFEASIBLE

    if args.command == "plan" and result.unreachable:
        print(
            "Infeasible layers: {}".format(result.unreachable),
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE

    return 0


def main():
    """Execute the main application."""

    args, _ = _args()
    status = run(args)
    if status:
        raise SystemExit(status)
