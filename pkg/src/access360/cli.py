"""Command-line front end.

Subcommands: validate, catalog, ambi, annotate, simulate. Exit codes follow
one contract everywhere: 0 success (no error findings), 1 validation errors
or failed stream selection, 2 usage or I/O failures. Data goes to stdout,
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import ambisonics, catalog, manifest, simulator, timedtext
from .errors import Access360Error, RangeError
from .geometry import Direction

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


def _read_text(path: str) -> str:
    with open(path, "rb") as handle:
        return handle.read().decode("utf-8")


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _load_mpd(path: str) -> manifest.MediaPresentation:
    return manifest.parse_mpd(_read_text(path))


def _parse_sidecar_args(pairs: list[str]) -> dict[str, str]:
    sidecars = {}
    for pair in pairs:
        set_id, sep, path = pair.partition("=")
        if not sep or not set_id or not path:
            raise ValueError(f"sidecar argument {pair!r} is not adaptationSetId=path")
        sidecars[set_id] = path
    return sidecars


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        mp = _load_mpd(args.mpd)
        sidecar_paths = _parse_sidecar_args(args.sidecars)
    except (OSError, ValueError, Access360Error) as exc:
        return _fail(str(exc))

    sidecars: dict[str, object] = {}
    for set_id, path in sidecar_paths.items():
        try:
            sidecars[set_id] = timedtext.parse_ttml(_read_text(path))
        except RangeError as exc:
            # out-of-range direction annotations surface as rule R8
            sidecars[set_id] = exc
        except (OSError, Access360Error) as exc:
            return _fail(f"{path}: {exc}")

    report = catalog.validate(mp, sidecars)
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2))
    else:
        for finding in report.findings:
            print(f"{finding.severity.value.upper():7s} {finding.rule_id:3s} "
                  f"{finding.element_path}: {finding.message}")
        errors = len(report.errors)
        print(f"{errors} error(s), {len(report.findings) - errors} other finding(s)")
    return EXIT_FINDINGS if report.has_errors() else EXIT_OK


def cmd_catalog(args: argparse.Namespace) -> int:
    try:
        mp = _load_mpd(args.mpd)
    except (OSError, Access360Error) as exc:
        return _fail(str(exc))
    cat = catalog.classify(mp)
    if args.json:
        print(json.dumps(cat.to_json_dict(), indent=2))
        return EXIT_OK
    for sub in cat.subtitles:
        flags = [sub.role.value]
        if sub.hard_of_hearing:
            flags.append("hard-of-hearing")
        if sub.easy_to_read:
            flags.append("easy-to-read")
        print(f"subtitle  {sub.adaptation_set_id}  lang={sub.lang}  [{', '.join(flags)}]")
    for aud in cat.audio:
        extra = ""
        if aud.variants:
            variants = ", ".join(f"{v.variant.gain}/{v.variant.mode}" for v in aud.variants)
            extra = f"  variants: {variants}"
        if aud.ambisonic is not None:
            extra += f"  ambisonic: {ambisonics.format_channel_map(aud.ambisonic.entries)}"
        print(f"audio     {aud.adaptation_set_id}  lang={aud.lang}  "
              f"{aud.kind.value}/{aud.mix.value}{extra}")
    for sl in cat.sign_language:
        print(f"sign      {sl.video_adaptation_set_id}  lang={sl.sign_lang}  "
              f"metadata={sl.metadata_adaptation_set_id}")
    for warning in cat.warnings:
        print(f"{warning.severity.value}: {warning.rule_id} {warning.element_path}: "
              f"{warning.message}", file=sys.stderr)
    return EXIT_OK


_ROLE_LABELS = {"L": "head-lock left", "R": "head-lock right", "M": "head-lock mono"}


def cmd_ambi(args: argparse.Namespace) -> int:
    if args.action == "parse":
        try:
            entries = ambisonics.parse_channel_map(args.source)
        except ambisonics.ChannelMapError as exc:
            return _fail(str(exc))
        for entry in entries:
            label = _ROLE_LABELS.get(entry.token, f"ACN {entry.acn_index}")
            print(f"{entry.token:3s} {label}")
        return EXIT_OK

    try:
        mp = _load_mpd(args.source)
    except (OSError, Access360Error) as exc:
        return _fail(str(exc))
    preselections = list(mp.preselections)
    if args.preselection is not None:
        preselections = [p for i, p in enumerate(mp.preselections, start=1)
                         if args.preselection in (p.id, p.lang, str(i))]
        if not preselections:
            return _fail(f"no preselection matches {args.preselection!r}")
    if not preselections:
        return _fail("manifest contains no Preselection elements")
    layouts = []
    for preselection in preselections:
        try:
            layouts.append(ambisonics.resolve_preselection(mp, preselection))
        except ambisonics.ChannelMapError as exc:
            return _fail(str(exc))
    payload = [layout.to_json_dict() for layout in layouts]
    print(json.dumps(payload[0] if len(payload) == 1 else payload, indent=2))
    return EXIT_OK


def cmd_annotate(args: argparse.Namespace) -> int:
    try:
        direction = Direction(args.azimuth, args.elevation)
    except RangeError as exc:
        return _fail(str(exc))
    try:
        doc = timedtext.parse_ttml(_read_text(args.ttml))
        annotated = timedtext.annotate_direction(doc, args.cue, direction)
    except (OSError, Access360Error) as exc:
        return _fail(str(exc))
    output = timedtext.serialize_ttml(annotated)
    if args.output is None:
        print(output, end="")
    else:
        try:
            with open(args.output, "w", encoding="utf-8") as handle:
                handle.write(output)
        except OSError as exc:
            return _fail(str(exc))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        mp = _load_mpd(args.mpd)
        doc_paths = _parse_sidecar_args(args.ttml)
        docs = {set_id: timedtext.parse_ttml(_read_text(path))
                for set_id, path in doc_paths.items()}
        prefs = simulator.prefs_from_json(_read_text(args.prefs))
        trace = simulator.trace_from_json(_read_text(args.trace))
    except (OSError, ValueError, Access360Error) as exc:
        return _fail(str(exc))

    try:
        directives = simulator.simulate(mp, docs, prefs, trace)
    except (simulator.SelectionFailed, simulator.MissingDocument) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    except Access360Error as exc:
        # e.g. a trace sample outside the viewport ranges
        return _fail(str(exc))

    payload = simulator.write_directives(directives, args.format)
    try:
        if args.output is None:
            sys.stdout.buffer.write(payload)
        else:
            with open(args.output, "wb") as handle:
                handle.write(payload)
        if args.plot is not None:
            from . import report

            report.render_run_figure(directives, trace, args.plot)
    except OSError as exc:
        return _fail(str(exc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="access360",
        description="Accessibility signaling toolkit for 360-degree streaming",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a manifest and sidecars")
    p_validate.add_argument("mpd", help="path to the MPD manifest")
    p_validate.add_argument("sidecars", nargs="*",
                            help="sidecar documents as adaptationSetId=path")
    p_validate.add_argument("--json", action="store_true",
                            help="print the report as JSON")
    p_validate.set_defaults(func=cmd_validate)

    p_catalog = sub.add_parser("catalog", help="list the access services of a manifest")
    p_catalog.add_argument("mpd", help="path to the MPD manifest")
    p_catalog.add_argument("--json", action="store_true", help="print JSON")
    p_catalog.set_defaults(func=cmd_catalog)

    p_ambi = sub.add_parser("ambi", help="inspect ambisonic channel maps")
    p_ambi.add_argument("action", choices=("parse", "resolve"))
    p_ambi.add_argument("source", help="channel-map value (parse) or MPD path (resolve)")
    p_ambi.add_argument("--preselection",
                        help="select one preselection by id, lang or 1-based index")
    p_ambi.set_defaults(func=cmd_ambi)

    p_annotate = sub.add_parser("annotate", help="set a cue's speaker direction")
    p_annotate.add_argument("ttml", help="path to the TTML document")
    p_annotate.add_argument("--cue", required=True, help="cue id to annotate")
    p_annotate.add_argument("--azimuth", type=float, required=True)
    p_annotate.add_argument("--elevation", type=float, default=0.0)
    p_annotate.add_argument("-o", "--output", help="output path (default stdout)")
    p_annotate.set_defaults(func=cmd_annotate)

    p_simulate = sub.add_parser("simulate", help="run the presentation simulator")
    p_simulate.add_argument("--mpd", required=True, help="path to the MPD manifest")
    p_simulate.add_argument("--ttml", action="append", default=[],
                            metavar="ID=PATH", help="cue document per adaptation set")
    p_simulate.add_argument("--prefs", required=True, help="preferences JSON path")
    p_simulate.add_argument("--trace", required=True, help="viewport trace JSON path")
    p_simulate.add_argument("-o", "--output", help="output path (default stdout)")
    p_simulate.add_argument("--format", choices=("json", "csv"), default="json")
    p_simulate.add_argument("--plot",
                            help="also render a run overview figure to this path")
    p_simulate.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
