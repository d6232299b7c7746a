"""``spinpart <scenario> [--config FILE] [--set key=value]... [--output DIR]
[--format csv|json] [--plot] [--seed N]``

Any other ``--key value`` (or ``--key=value``) pair is treated like
``--set key=value``. Precedence: scenario defaults, then the JSON config
file, then overrides in command-line order.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dynamics import NumericalError
from .scenarios import SCENARIOS, ConfigError, render_csv, render_json, render_svg, run_scenario

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="spinpart",
        description="Spin J as 2J symmetric qubits: pair extraction, entanglement witnesses, tomography and pair loss.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Run 'spinpart <scenario> --help' for the configuration keys and CSV columns of each scenario.",
    )
    sub = parser.add_subparsers(dest="scenario", metavar="scenario", parser_class=_Parser)
    for name, sc in SCENARIOS.items():
        p = sub.add_parser(
            name,
            help=sc.description.splitlines()[0],
            description=sc.help_text(),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        p.add_argument("--config", metavar="FILE", help="JSON document of configuration keys")
        p.add_argument("--set", metavar="KEY=VALUE", action="append", default=[], help="override one configuration key")
        p.add_argument("--output", metavar="DIR", help="write <scenario>.<format> here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--plot", action="store_true", help="also write <scenario>.svg (needs --output and matplotlib)")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled quantities (default 0)")
    return parser


def _extra_overrides(extra: list) -> list:
    pairs, i = [], 0
    while i < len(extra):
        token = extra[i]
        if not token.startswith("--") or len(token) == 2:
            raise _UsageError(f"unexpected argument {token!r}")
        if "=" in token:
            key, value = token[2:].split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise _UsageError(f"option {token} needs a value")
            key, value = token[2:], extra[i + 1]
            i += 2
        pairs.append((key, value))
    return pairs


def _gather_overrides(args, extra) -> dict:
    overrides = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        overrides.update(doc)
    for item in args.set:
        if "=" not in item:
            raise _UsageError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    for key, value in _extra_overrides(extra):
        overrides[key] = value
    return overrides


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if args.scenario is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        overrides = _gather_overrides(args, extra)
        if args.plot and not args.output:
            raise _UsageError("--plot needs --output")
        report, cfg = run_scenario(args.scenario, overrides, seed=args.seed)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"spinpart: numerical failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"spinpart: {exc}", file=sys.stderr)
        return EXIT_USAGE

    render = render_csv if args.format == "csv" else render_json
    text = render(args.scenario, cfg, args.seed, report)
    if not args.output:
        sys.stdout.write(text)
        return EXIT_OK
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{args.scenario}.{args.format}"
    path.write_bytes(text.encode())
    print(path)
    if args.plot:
        if report.plot is None:
            print(f"spinpart: scenario {args.scenario} has no plot", file=sys.stderr)
            return EXIT_USAGE
        try:
            render_svg(report, out / f"{args.scenario}.svg")
        except ImportError:
            print("spinpart: --plot needs matplotlib", file=sys.stderr)
            return EXIT_USAGE
        print(out / f"{args.scenario}.svg")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
