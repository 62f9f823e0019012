"""Headless presentation simulator.

Combines a manifest, user preferences, cue documents and a scripted viewport
trace into one render directive per trace sample: the subtitle text/color and
its arrow/radar indicator, plus signer visibility, label, color and
indicator. The simulation is a pure function of its inputs; serialized output
is byte-identical across runs.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .catalog import (
    AdPrefs,
    AstPrefs,
    NoMatch,
    SlPrefs,
    StreamSelection,
    SubtitlePrefs,
    UserPreferences,
    classify,
    select_streams,
)
from .errors import Access360Error, InvariantViolation
from .geometry import IndicatorCue, IndicatorKind, IndicatorStyle, ViewportState, indicator_for
from .manifest import MediaPresentation
from .timedtext import CueDocument, MediaTime, active_cues, cue_color, signer_state


class SelectionFailed(Access360Error):
    """Stream selection could not satisfy the preferences."""


class MissingDocument(Access360Error):
    def __init__(self, set_id: str):
        self.set_id = set_id
        super().__init__(f"no cue document supplied for adaptation set {set_id!r}")


class TraceError(Access360Error):
    """The viewport trace is malformed."""


@dataclass(frozen=True)
class TraceSample:
    t: MediaTime
    yaw: float
    pitch: float


@dataclass(frozen=True)
class ViewportTrace:
    hfov: float
    vfov: float
    samples: tuple[TraceSample, ...]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        previous = None
        for sample in self.samples:
            if previous is not None and sample.t <= previous:
                raise TraceError("trace sample times must be strictly increasing")
            previous = sample.t


@dataclass(frozen=True)
class SubtitleDirective:
    text: str
    color: str | None = None
    indicator: IndicatorCue | None = None


@dataclass(frozen=True)
class SignerDirective:
    visible: bool
    label: str | None = None
    color: str | None = None
    indicator: IndicatorCue | None = None


@dataclass(frozen=True)
class RenderDirective:
    t: MediaTime
    subtitle: SubtitleDirective | None
    signer: SignerDirective | None
    selected_streams: StreamSelection


def _indicator_json(indicator: IndicatorCue | None) -> dict | None:
    if indicator is None:
        return None
    return {"kind": indicator.kind.value, "relativeAzimuth": indicator.relative_azimuth}


def _indicator_from_json(data: dict | None) -> IndicatorCue | None:
    if data is None:
        return None
    return IndicatorCue(IndicatorKind(data["kind"]), data["relativeAzimuth"])


def directive_to_json_dict(directive: RenderDirective) -> dict:
    subtitle = None
    if directive.subtitle is not None:
        subtitle = {
            "text": directive.subtitle.text,
            "color": directive.subtitle.color,
            "indicator": _indicator_json(directive.subtitle.indicator),
        }
    signer = None
    if directive.signer is not None:
        signer = {
            "visible": directive.signer.visible,
            "label": directive.signer.label,
            "color": directive.signer.color,
            "indicator": _indicator_json(directive.signer.indicator),
        }
    return {
        "t": directive.t.to_clock(),
        "subtitle": subtitle,
        "signer": signer,
        "selectedStreams": directive.selected_streams.to_json_dict(),
    }


def directive_from_json_dict(data: dict) -> RenderDirective:
    subtitle = None
    if data.get("subtitle") is not None:
        raw = data["subtitle"]
        subtitle = SubtitleDirective(raw["text"], raw.get("color"),
                                     _indicator_from_json(raw.get("indicator")))
    signer = None
    if data.get("signer") is not None:
        raw = data["signer"]
        signer = SignerDirective(raw["visible"], raw.get("label"), raw.get("color"),
                                 _indicator_from_json(raw.get("indicator")))
    streams = data.get("selectedStreams") or {}
    selection = StreamSelection(
        subtitle_as=streams.get("subtitleAs"),
        audio_as=streams.get("audioAs"),
        sl_video_as=streams.get("slVideoAs"),
        sl_metadata_as=streams.get("slMetadataAs"),
        representation_ids=streams.get("representationIds") or {},
    )
    return RenderDirective(MediaTime.from_clock(data["t"]), subtitle, signer, selection)


def simulate(mp: MediaPresentation, docs: dict[str, CueDocument],
             prefs: UserPreferences, trace: ViewportTrace) -> list[RenderDirective]:
    """Produce one render directive per trace sample.

    Raises SelectionFailed when the preferences cannot be satisfied and
    MissingDocument when a selected text/metadata stream has no cue document.
    """
    try:
        selection = select_streams(classify(mp), prefs)
    except NoMatch as exc:
        raise SelectionFailed(str(exc)) from exc

    subtitle_doc = None
    if selection.subtitle_as is not None:
        subtitle_doc = docs.get(selection.subtitle_as)
        if subtitle_doc is None:
            raise MissingDocument(selection.subtitle_as)
    signer_doc = None
    if selection.sl_metadata_as is not None:
        signer_doc = docs.get(selection.sl_metadata_as)
        if signer_doc is None:
            raise MissingDocument(selection.sl_metadata_as)

    style = (prefs.subtitle.indicator_style if prefs.subtitle is not None
             else IndicatorStyle.ARROW)
    hide_inactive = (prefs.sign_language.hide_when_inactive
                     if prefs.sign_language is not None else False)

    directives: list[RenderDirective] = []
    for sample in trace.samples:
        viewport = ViewportState(sample.yaw, sample.pitch, trace.hfov, trace.vfov)

        subtitle = None
        if subtitle_doc is not None:
            cues = active_cues(subtitle_doc, sample.t)
            if cues:
                cue = max(enumerate(cues),
                          key=lambda item: (item[1].begin.millis, item[0]))[1]
                indicator = None
                if cue.direction is not None:
                    indicator = indicator_for(viewport, cue.direction, style)
                subtitle = SubtitleDirective(cue.text(), cue_color(subtitle_doc, cue),
                                             indicator)

        signer = None
        if signer_doc is not None:
            state = signer_state(signer_doc, sample.t)
            visible = state.active or not hide_inactive
            if state.active:
                indicator = None
                if state.direction is not None:
                    indicator = indicator_for(viewport, state.direction, style)
                signer = SignerDirective(visible, state.speaker_name, state.color,
                                         indicator)
            else:
                signer = SignerDirective(visible)

        directives.append(RenderDirective(sample.t, subtitle, signer, selection))
    return directives


_CSV_COLUMNS = (
    "t", "subtitleText", "subtitleColor", "subtitleIndicatorKind",
    "subtitleIndicatorRelativeAzimuth", "signerVisible", "signerLabel",
    "signerColor", "signerIndicatorKind", "signerIndicatorRelativeAzimuth",
    "subtitleAs", "audioAs", "slVideoAs", "slMetadataAs",
)


def write_directives(directives: list[RenderDirective], fmt: str = "json") -> bytes:
    """Serialize directives: "json" (invertible) or "csv" (one flat row per sample)."""
    if fmt == "json":
        payload = [directive_to_json_dict(d) for d in directives]
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for directive in directives:
            sub, signer = directive.subtitle, directive.signer
            sub_ind = sub.indicator if sub is not None else None
            signer_ind = signer.indicator if signer is not None else None
            selection = directive.selected_streams
            writer.writerow([
                directive.t.to_clock(),
                sub.text if sub is not None else "",
                (sub.color or "") if sub is not None else "",
                sub_ind.kind.value if sub_ind is not None else "",
                sub_ind.relative_azimuth if sub_ind is not None else "",
                ("true" if signer.visible else "false") if signer is not None else "",
                (signer.label or "") if signer is not None else "",
                (signer.color or "") if signer is not None else "",
                signer_ind.kind.value if signer_ind is not None else "",
                signer_ind.relative_azimuth if signer_ind is not None else "",
                selection.subtitle_as or "",
                selection.audio_as or "",
                selection.sl_video_as or "",
                selection.sl_metadata_as or "",
            ])
        return buffer.getvalue().encode("utf-8")
    raise InvariantViolation(f"unknown directive format {fmt!r}")


def read_directives(data: bytes) -> list[RenderDirective]:
    """Parse directives written in the JSON format."""
    return [directive_from_json_dict(item) for item in json.loads(data.decode("utf-8"))]


def prefs_from_json(data: str | bytes | dict) -> UserPreferences:
    """Build preferences from their lowerCamelCase JSON mirror."""
    if not isinstance(data, dict):
        data = json.loads(data)
    subtitle = None
    if data.get("subtitle") is not None:
        raw = data["subtitle"]
        subtitle = SubtitlePrefs(
            lang=raw["lang"],
            easy_to_read=bool(raw.get("easyToRead", False)),
            indicator_style=IndicatorStyle(raw.get("indicatorStyle", "arrow")),
        )
    audio_description = None
    if data.get("audioDescription") is not None:
        raw = data["audioDescription"]
        audio_description = AdPrefs(raw["lang"], raw.get("gain"), raw.get("mode"))
    spoken = None
    if data.get("spokenSubtitles") is not None:
        spoken = AstPrefs(data["spokenSubtitles"]["lang"])
    sign_language = None
    if data.get("signLanguage") is not None:
        raw = data["signLanguage"]
        sign_language = SlPrefs(raw["signLang"], bool(raw.get("hideWhenInactive", False)))
    return UserPreferences(subtitle, audio_description, spoken, sign_language)


def trace_from_json(data: str | bytes | dict) -> ViewportTrace:
    """Build a trace from {"hfov", "vfov", "samples": [{"t", "yaw", "pitch"}]}."""
    if not isinstance(data, dict):
        data = json.loads(data)
    try:
        samples = tuple(
            TraceSample(MediaTime.from_clock(item["t"]),
                        float(item["yaw"]), float(item["pitch"]))
            for item in data["samples"]
        )
        return ViewportTrace(float(data["hfov"]), float(data["vfov"]), samples)
    except (KeyError, TypeError, ValueError) as exc:
        raise TraceError(f"malformed trace: {exc}") from exc
