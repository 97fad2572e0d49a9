"""Command-line entry point: ``fiberpulse simulate | analyze | spectrum``.

Exit codes: 0 success, 1 usage error, 2 malformed data or config,
3 analysis failure (e.g. no beats found).
"""

import argparse
import json
import sys

from . import __version__
from .core import Site
from .dsp import power_spectrum
from .errors import FiberPulseError, NoBeatsFound, SchemaError
from .io import (
    RunConfig,
    digest,
    load_config,
    read_recording,
    truth_path,
    write_recording,
    write_report,
    write_truth,
)
from .synth import simulate_scenario
from .vitals import analyze_recording

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_ANALYSIS = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _config(path):
    return load_config(path) if path else RunConfig()


def cmd_simulate(args):
    run = _config(args.config)
    cfg = run.scenario_config(seed=args.seed)
    recording, truth = simulate_scenario(cfg, transfer=run.transfer)
    write_recording(recording, args.output)
    write_truth(truth, cfg.seed, truth_path(args.output))
    print(f"wrote {len(recording.channels[0])} samples x "
          f"{len(recording.channels)} channels to {args.output}")
    return EXIT_OK


def _fmt(value, spec, unit):
    return "n/a" if value is None else f"{value:{spec}} {unit}"


def _seed(args):
    """Explicit ``--seed``, else the seed in the simulator's truth sidecar."""
    if args.seed is not None:
        return args.seed
    try:
        with open(truth_path(args.input), encoding="utf-8") as fh:
            seed = json.load(fh).get("seed")
    except (OSError, ValueError, AttributeError):
        return None
    return seed if isinstance(seed, int) else None


def cmd_analyze(args):
    run = _config(args.config)
    recording = read_recording(args.input)
    speed = None if args.speed_kmh is None else args.speed_kmh / 3.6
    report = analyze_recording(
        recording, path_difference=args.distance_m, speed=speed,
        filter_spec=run.filter, detector=run.detector,
    )
    settings = {**run.analysis_dict(), "distance_m": args.distance_m,
                "speed_kmh": args.speed_kmh}
    metadata = {"config_digest": digest(settings), "seed": _seed(args),
                "tool_version": __version__}
    if args.report:
        write_report(report, args.report, metadata)
    print(" | ".join([
        "HR " + _fmt(report.heart_rate, ".1f", "bpm"),
        "RR " + _fmt(report.respiration_rate, ".1f", "/min"),
        "cadence " + _fmt(report.cadence, ".2f", "Hz"),
        "PWV " + _fmt(report.pwv, ".2f", "m/s"),
    ]))
    return EXIT_OK


def cmd_spectrum(args):
    run = _config(args.config)
    recording = read_recording(args.input)
    try:
        site = Site(args.column)
        trace = recording.channel(site)
    except (ValueError, KeyError):
        raise UsageError(f"no column {args.column!r} in {args.input}") from None
    seg = min(run.spectrum.segment_seconds, trace.duration)
    spec = power_spectrum(trace, seg, run.spectrum.overlap_frac)
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("frequency_Hz,psd\n")
        for f, p in zip(spec.frequencies, spec.power):
            fh.write(f"{f:.9g},{p:.12g}\n")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="fiberpulse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="write a synthetic recording and its ground truth")
    p.add_argument("--config", required=True, help="scenario config (JSON)")
    p.add_argument("--output", "-o", required=True, help="recording CSV to write")
    p.add_argument("--seed", type=int, help="override scenario.seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="extract vitals from a recording CSV")
    p.add_argument("input")
    p.add_argument("--distance-m", type=float, help="wrist-ankle path difference (m)")
    p.add_argument("--speed-kmh", type=float, help="treadmill speed (km/h)")
    p.add_argument("--report", help="JSON report to write")
    p.add_argument("--config", help="analysis config (JSON)")
    p.add_argument("--seed", type=int, help="seed recorded in the report metadata")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("spectrum", help="write the power spectrum of one column")
    p.add_argument("input")
    p.add_argument("--column", required=True, help="site column, e.g. chest")
    p.add_argument("--output", "-o", required=True, help="two-column CSV to write")
    p.add_argument("--config", help="config with a 'spectrum' section (JSON)")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"fiberpulse: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoBeatsFound as exc:
        print(f"fiberpulse: analysis failed: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except (SchemaError, OSError) as exc:
        print(f"fiberpulse: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FiberPulseError as exc:
        print(f"fiberpulse: analysis failed: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
