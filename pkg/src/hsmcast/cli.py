"""Command-line front end.

Loads configuration with the precedence command line > config file > built-in
defaults, runs the campaign for the selected policies and writes the report
files. The config file is flat `key = value` text; keys are the flat
configuration names (see README), `#` starts a comment.
"""

from __future__ import annotations

import argparse
import sys

from . import _kernels
from .errors import ConfigurationError, PlanningError, TableError
from .policies import Policy
from .reports import write_reports
from .scenario import ALL_POLICIES, ScenarioConfig, config_from_flat, run_campaign


class _Parser(argparse.ArgumentParser):
    # single-line diagnostics instead of usage dumps
    def error(self, message):
        raise CliError(message)


class CliError(Exception):
    pass


def read_config_file(path) -> dict:
    values = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigurationError(
                        f"{path}:{lineno}: expected key = value")
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file: {exc}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hsmcast",
                     description="multicast subgrouping simulator")
    parser.add_argument("--config", metavar="PATH",
                        help="flat key = value configuration file")
    parser.add_argument("--policy", choices=["sg", "gb", "egb", "all"],
                        default="all", help="planning policy to run")
    parser.add_argument("--seed", type=int, metavar="N",
                        help="master seed for the campaign")
    parser.add_argument("--drops", type=int, metavar="N",
                        help="number of independent drops")
    parser.add_argument("--ttis", type=int, metavar="N",
                        help="simulated TTIs per drop (2 ms each)")
    parser.add_argument("--bler", type=int, choices=[5, 10, 15, 20],
                        help="block-error target in percent")
    parser.add_argument("--gb-subgroups", type=int, metavar="N",
                        help="subgroup count for the group-based policy")
    parser.add_argument("--max-codes", type=int, metavar="N",
                        help="channelization code budget")
    parser.add_argument("--out", metavar="DIR", default=".",
                        help="output directory for report files")
    parser.add_argument("--fading", choices=["off", "peda"],
                        help="fast fading mode")
    return parser


_FLAG_TO_KEY = {
    "seed": "seed",
    "drops": "drops",
    "ttis": "num_ttis",
    "bler": "bler_target",
    "gb_subgroups": "gb_subgroups",
    "max_codes": "max_codes",
    "fading": "fading",
}


def build_config(args) -> ScenarioConfig:
    config = ScenarioConfig()
    if args.config:
        config = config_from_flat(read_config_file(args.config), base=config)
    overrides = {}
    for attr, key in _FLAG_TO_KEY.items():
        value = getattr(args, attr)
        if value is not None:
            overrides[key] = value
    if overrides:
        config = config_from_flat(overrides, base=config)
    config.validate()
    return config


def selected_policies(token: str):
    if token == "all":
        return ALL_POLICIES
    return (Policy.from_token(token),)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = build_config(args)
        which = selected_policies(args.policy)
    except CliError as exc:
        print(f"hsmcast: error: {exc}", file=sys.stderr)
        return 2
    except (ConfigurationError, TableError) as exc:
        print(f"hsmcast: error: {exc}", file=sys.stderr)
        return 2

    try:
        result = run_campaign(config, which)
        paths = write_reports(result, args.out, [p.value for p in which])
    except (ConfigurationError, TableError) as exc:
        print(f"hsmcast: error: {exc}", file=sys.stderr)
        return 2
    except (PlanningError, OSError) as exc:
        print(f"hsmcast: error: {exc}", file=sys.stderr)
        return 1

    print(f"backend: {_kernels.BACKEND}")
    for token in (p.value for p in which):
        agg = result.aggregates[token]
        print(f"{token}: mean dissatisfaction {agg.mean_gdi_kbps:.2f} kbps, "
              f"normalized {agg.mean_normalized:.6f}, "
              f"codes up to {agg.max_codes_used}")
    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
