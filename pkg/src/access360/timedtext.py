"""TTML/IMSC subset parser and serializer with speaker-direction annotations.

Covers regular subtitle documents and the sign-language sidecar metadata
documents, which share the same format: timed p elements with optional
direction attributes, styles (including per-character styles tagged
imac:type="stCharacter") and regions. Directions are carried either as
azimuth/elevation (audio-source family) or as equirectangular
longitude/latitude (converted to azimuth/elevation on parse).

Only clock-time expressions ("hh:mm:ss.fff") are supported.
"""

from __future__ import annotations

import dataclasses
import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum

from .errors import Access360Error, InvariantViolation, MalformedXml, RangeError
from .geometry import Direction, direction_to_longitude_latitude, wrap_degrees
from .manifest import IMAC_NS, IMAC_URIS

TT_NS = "http://www.w3.org/ns/ttml"
TTS_NS = "http://www.w3.org/ns/ttml#styling"
XML_NS = "http://www.w3.org/XML/1998/namespace"
EBUTTM_NS = "urn:ebu:tt:metadata"

ET.register_namespace("tt", TT_NS)
ET.register_namespace("tts", TTS_NS)
ET.register_namespace("ebuttm", EBUTTM_NS)

TEXT_ALIGN_VALUES = ("left", "center", "right", "start", "end")

_HEX_COLOR_RE = re.compile(r"^#[0-9a-fA-F]{6}(?:[0-9a-fA-F]{2})?$")
_CLOCK_RE = re.compile(r"^(\d{2,}):([0-5]\d):([0-5]\d)(?:\.(\d{1,3}))?$")


class BadTime(Access360Error):
    """A time expression is not a supported clock time, or begin >= end."""


class UnresolvedReference(Access360Error):
    def __init__(self, ref: str, kind: str = "reference"):
        self.ref = ref
        super().__init__(f"unresolved {kind} {ref!r}")


class ConflictingDirection(Access360Error):
    def __init__(self, cue_id: str):
        self.cue_id = cue_id
        super().__init__(f"cue {cue_id!r} carries both direction attribute families")


class UnknownCue(Access360Error):
    def __init__(self, cue_id: str):
        self.cue_id = cue_id
        super().__init__(f"no cue with id {cue_id!r}")


@dataclass(frozen=True, order=True)
class MediaTime:
    """A media timestamp with millisecond precision."""

    millis: int

    def __post_init__(self):
        if self.millis < 0:
            raise BadTime(f"negative time {self.millis}ms")

    @classmethod
    def from_clock(cls, text: str) -> "MediaTime":
        match = _CLOCK_RE.match(text)
        if not match:
            raise BadTime(f"unsupported time expression {text!r}")
        hours, minutes, seconds, fraction = match.groups()
        millis = (int(hours) * 3600 + int(minutes) * 60 + int(seconds)) * 1000
        if fraction:
            millis += int(fraction.ljust(3, "0"))
        return cls(millis)

    @classmethod
    def from_seconds(cls, seconds: float) -> "MediaTime":
        return cls(int(round(seconds * 1000)))

    @property
    def seconds(self) -> float:
        return self.millis / 1000.0

    def to_clock(self) -> str:
        total, millis = divmod(self.millis, 1000)
        hours, rest = divmod(total, 3600)
        minutes, seconds = divmod(rest, 60)
        return f"{hours:02d}:{minutes:02d}:{seconds:02d}.{millis:03d}"


@dataclass(frozen=True)
class Region:
    """A subtitle region in percent of the root container."""

    id: str
    origin: tuple[float, float] = (0.0, 0.0)
    extent: tuple[float, float] = (100.0, 100.0)

    def __post_init__(self):
        for start, size in zip(self.origin, self.extent):
            if start < 0.0:
                raise RangeError("tts:origin", start, "must be >= 0")
            if size < 0.0:
                raise RangeError("tts:extent", size, "must be >= 0")
            # small float tolerance so that exact-100 splits survive
            if start + size > 100.0 + 1e-9:
                raise RangeError("tts:extent", start + size,
                                 "region must not extend the root container")


@dataclass(frozen=True)
class Style:
    id: str
    text_align: str | None = None
    color: str | None = None
    background_color: str | None = None
    font_size: str | None = None
    imac_type: str | None = None

    def __post_init__(self):
        if self.text_align is not None and self.text_align not in TEXT_ALIGN_VALUES:
            raise RangeError("tts:textAlign", self.text_align,
                             f"allowed values {TEXT_ALIGN_VALUES}")
        if self.color is not None and not _HEX_COLOR_RE.match(self.color):
            raise RangeError("tts:color", self.color, "expected #RRGGBB or #RRGGBBAA")


class DirectionFamily(str, Enum):
    AUDIO_SOURCE = "audioSource"
    EQUIRECTANGULAR = "equirectangular"


@dataclass(frozen=True)
class Span:
    style_id: str | None
    text: str


@dataclass(frozen=True)
class Cue:
    id: str
    begin: MediaTime
    end: MediaTime
    region_id: str | None = None
    style_id: str | None = None
    spans: tuple[Span, ...] = ()
    direction: Direction | None = None
    source_attrs: DirectionFamily | None = None

    def __post_init__(self):
        object.__setattr__(self, "spans", tuple(self.spans))
        if not self.begin < self.end:
            raise BadTime(f"cue {self.id!r}: begin {self.begin.to_clock()} "
                          f"must precede end {self.end.to_clock()}")
        if (self.direction is None) != (self.source_attrs is None):
            raise InvariantViolation(
                "direction and source_attrs must be present together")

    def text(self) -> str:
        return "".join(span.text for span in self.spans)


@dataclass(frozen=True)
class CueDocument:
    """A parsed TTML document: styles, regions and time-ordered cues."""

    regions: tuple[Region, ...] = ()
    styles: tuple[Style, ...] = ()
    cues: tuple[Cue, ...] = ()
    easy_to_read_content_type: bool = False
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "styles", tuple(self.styles))
        object.__setattr__(self, "cues",
                           tuple(sorted(self.cues, key=lambda c: c.begin.millis)))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        region_ids = {region.id for region in self.regions}
        style_ids = {style.id for style in self.styles}
        for cue in self.cues:
            if cue.region_id is not None and cue.region_id not in region_ids:
                raise UnresolvedReference(cue.region_id, "region")
            if cue.style_id is not None and cue.style_id not in style_ids:
                raise UnresolvedReference(cue.style_id, "style")
            for span in cue.spans:
                if span.style_id is not None and span.style_id not in style_ids:
                    raise UnresolvedReference(span.style_id, "style")

    def style(self, style_id: str) -> Style | None:
        for style in self.styles:
            if style.id == style_id:
                return style
        return None

    def cue(self, cue_id: str) -> Cue | None:
        for cue in self.cues:
            if cue.id == cue_id:
                return cue
        return None


@dataclass(frozen=True)
class SignerState:
    """Interpreter activity at one instant of a sign-metadata document."""

    active: bool
    speaker_name: str | None = None
    color: str | None = None
    direction: Direction | None = None
    cue_id: str | None = None

    def __post_init__(self):
        if not self.active and any(
                v is not None for v in (self.speaker_name, self.color,
                                        self.direction, self.cue_id)):
            raise InvariantViolation("inactive signer state carries no details")


def _local(tag: str) -> str:
    return tag.rpartition("}")[2]


def _attr(elem: ET.Element, local: str, uris: tuple[str, ...], bare: bool = True) -> str | None:
    for uri in uris:
        value = elem.get(f"{{{uri}}}{local}")
        if value is not None:
            return value
    if bare:
        return elem.get(local)
    return None


def _imac_attr(elem: ET.Element, local: str) -> str | None:
    return _attr(elem, local, IMAC_URIS, bare=False)


def _parse_angle(name: str, raw: str, low: float, high: float) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise RangeError(name, raw, "not a number") from None
    if not low <= value <= high:
        raise RangeError(name, value, f"allowed range [{low}, {high}]")
    return value


def _norm_text(raw: str | None) -> str:
    return " ".join((raw or "").split())


def _parse_percent_pair(name: str, raw: str) -> tuple[float, float]:
    parts = raw.split()
    if len(parts) != 2 or not all(p.endswith("%") for p in parts):
        raise RangeError(name, raw, "expected 'x% y%'")
    try:
        return float(parts[0][:-1]), float(parts[1][:-1])
    except ValueError:
        raise RangeError(name, raw, "expected numeric percentages") from None


def _format_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


class _TtmlParser:
    def __init__(self):
        self.warnings: list[str] = []
        self._anon = 0

    def parse(self, xml_text: str) -> CueDocument:
        try:
            root = ET.fromstring(xml_text)
        except ET.ParseError as exc:
            raise MalformedXml(str(exc)) from exc
        except ValueError as exc:
            raise MalformedXml(str(exc)) from exc
        if _local(root.tag) != "tt":
            raise MalformedXml(f"root element is {_local(root.tag)!r}, expected tt")
        for attr_name in root.attrib:
            if _local(attr_name) == "aspectRatio":
                self.warnings.append("ittp:aspectRatio present but not interpreted")

        styles: list[Style] = []
        regions: list[Region] = []
        easy = False
        head = next((c for c in root if _local(c.tag) == "head"), None)
        if head is not None:
            for section in head:
                name = _local(section.tag)
                if name == "styling":
                    for el in section:
                        if _local(el.tag) == "style":
                            style = self._style(el)
                            if style is not None:
                                styles.append(style)
                elif name == "layout":
                    for el in section:
                        if _local(el.tag) == "region":
                            region = self._region(el)
                            if region is not None:
                                regions.append(region)
                elif name == "metadata":
                    easy = easy or self._easy_flag(section)

        cues: list[Cue] = []
        body = next((c for c in root if _local(c.tag) == "body"), None)
        if body is not None:
            for el in body.iter():
                if _local(el.tag) == "p":
                    cues.append(self._cue(el))
        return CueDocument(tuple(regions), tuple(styles), tuple(cues), easy,
                           tuple(self.warnings))

    def _xml_id(self, elem: ET.Element) -> str | None:
        return elem.get(f"{{{XML_NS}}}id") or elem.get("id")

    def _style(self, elem: ET.Element) -> Style | None:
        style_id = self._xml_id(elem)
        if style_id is None:
            self.warnings.append("style without xml:id skipped")
            return None
        return Style(
            id=style_id,
            text_align=_attr(elem, "textAlign", (TTS_NS,)),
            color=_attr(elem, "color", (TTS_NS,)),
            background_color=_attr(elem, "backgroundColor", (TTS_NS,)),
            font_size=_attr(elem, "fontSize", (TTS_NS,)),
            imac_type=_imac_attr(elem, "type"),
        )

    def _region(self, elem: ET.Element) -> Region | None:
        region_id = self._xml_id(elem)
        if region_id is None:
            self.warnings.append("region without xml:id skipped")
            return None
        origin_raw = _attr(elem, "origin", (TTS_NS,))
        extent_raw = _attr(elem, "extent", (TTS_NS,))
        origin = _parse_percent_pair("tts:origin", origin_raw) if origin_raw else (0.0, 0.0)
        extent = _parse_percent_pair("tts:extent", extent_raw) if extent_raw else None
        if extent is None:
            extent = (100.0 - origin[0], 100.0 - origin[1])
        return Region(region_id, origin, extent)

    def _easy_flag(self, metadata: ET.Element) -> bool:
        for el in metadata.iter():
            if _local(el.tag) == "documentContentType":
                label = "".join(ch for ch in (el.text or "").lower() if ch.isalnum())
                if label == "easytoread":
                    return True
        return False

    def _cue(self, elem: ET.Element) -> Cue:
        cue_id = self._xml_id(elem)
        if cue_id is None:
            self._anon += 1
            cue_id = f"cue-{self._anon}"
            self.warnings.append(f"p without xml:id assigned id {cue_id!r}")
        begin_raw, end_raw = elem.get("begin"), elem.get("end")
        if begin_raw is None or end_raw is None:
            raise BadTime(f"cue {cue_id!r} needs begin and end clock times")
        direction, family = self._direction(elem, cue_id)

        spans: list[Span] = []

        def add_plain(raw: str | None):
            text = _norm_text(raw)
            if text:
                spans.append(Span(None, text))

        add_plain(elem.text)
        for child in elem:
            if _local(child.tag) == "span":
                for local in ("audioSourceAzimuth", "audioSourceAzimut",
                              "audioSourceElevation", "equirectangularLongitude",
                              "equirectangularLatitude"):
                    if _imac_attr(child, local) is not None:
                        self.warnings.append(
                            f"cue {cue_id!r}: span-level direction attributes "
                            "are not modeled and were ignored")
                        break
                spans.append(Span(child.get("style"),
                                  _norm_text("".join(child.itertext()))))
            add_plain(child.tail)

        return Cue(
            id=cue_id,
            begin=MediaTime.from_clock(begin_raw),
            end=MediaTime.from_clock(end_raw),
            region_id=elem.get("region"),
            style_id=elem.get("style"),
            spans=tuple(spans),
            direction=direction,
            source_attrs=family,
        )

    def _direction(self, elem: ET.Element,
                   cue_id: str) -> tuple[Direction | None, DirectionFamily | None]:
        azimuth = _imac_attr(elem, "audioSourceAzimuth")
        if azimuth is None:
            # the published attribute name drops the final 'h' in places
            azimuth = _imac_attr(elem, "audioSourceAzimut")
            if azimuth is not None:
                self.warnings.append(
                    f"cue {cue_id!r}: alias attribute audioSourceAzimut accepted")
        elevation = _imac_attr(elem, "audioSourceElevation")
        longitude = _imac_attr(elem, "equirectangularLongitude")
        latitude = _imac_attr(elem, "equirectangularLatitude")

        has_audio_source = azimuth is not None or elevation is not None
        has_equirect = longitude is not None or latitude is not None
        if has_audio_source and has_equirect:
            raise ConflictingDirection(cue_id)
        if has_audio_source:
            az = (_parse_angle("imac:audioSourceAzimuth", azimuth, -180.0, 180.0)
                  if azimuth is not None else 0.0)
            el = (_parse_angle("imac:audioSourceElevation", elevation, -90.0, 90.0)
                  if elevation is not None else 0.0)
            return Direction(az, el), DirectionFamily.AUDIO_SOURCE
        if has_equirect:
            lat = (_parse_angle("imac:equirectangularLatitude", latitude, -90.0, 90.0)
                   if latitude is not None else 0.0)
            if longitude is not None:
                try:
                    lon = float(longitude)
                except ValueError:
                    raise RangeError("imac:equirectangularLongitude", longitude,
                                     "not a number") from None
                if not math.isfinite(lon):
                    raise RangeError("imac:equirectangularLongitude", longitude,
                                     "not finite")
            else:
                lon = 0.0
            return Direction(wrap_degrees(-lon), lat), DirectionFamily.EQUIRECTANGULAR
        return None, None


def parse_ttml(xml_text: str) -> CueDocument:
    """Parse a TTML/IMSC document (subtitles or sign-metadata sidecar)."""
    return _TtmlParser().parse(xml_text)


def active_cues(doc: CueDocument, t: MediaTime) -> list[Cue]:
    """Cues whose half-open interval [begin, end) contains t, in document order."""
    return [cue for cue in doc.cues if cue.begin <= t < cue.end]


def cue_color(doc: CueDocument, cue: Cue) -> str | None:
    """Resolve the display color of a cue from its style chain.

    Styles tagged imac:type="stCharacter" take precedence; otherwise the
    first referenced style that defines a color wins.
    """
    chain = [span.style_id for span in cue.spans if span.style_id is not None]
    if cue.style_id is not None:
        chain.append(cue.style_id)
    resolved = [doc.style(style_id) for style_id in chain]
    styles = [style for style in resolved if style is not None]
    for style in styles:
        if style.imac_type == "stCharacter" and style.color is not None:
            return style.color
    for style in styles:
        if style.color is not None:
            return style.color
    return None


def signer_state(doc: CueDocument, t: MediaTime) -> SignerState:
    """Interpreter state at time t; every cue is treated as a signer segment.

    Overlapping segments are malformed content; the latest-starting cue wins.
    """
    candidates = active_cues(doc, t)
    if not candidates:
        return SignerState(False)
    cue = max(enumerate(candidates), key=lambda item: (item[1].begin.millis, item[0]))[1]
    name = cue.spans[0].text if cue.spans else None
    return SignerState(True, name, cue_color(doc, cue), cue.direction, cue.id)


def annotate_direction(doc: CueDocument, cue_id: str, d: Direction) -> CueDocument:
    """Return a copy of the document with the named cue's direction replaced.

    The annotation always uses the audio-source attribute family.
    """
    replaced = False
    cues = []
    for cue in doc.cues:
        if cue.id == cue_id:
            cues.append(dataclasses.replace(
                cue, direction=d, source_attrs=DirectionFamily.AUDIO_SOURCE))
            replaced = True
        else:
            cues.append(cue)
    if not replaced:
        raise UnknownCue(cue_id)
    return CueDocument(doc.regions, doc.styles, tuple(cues),
                       doc.easy_to_read_content_type, doc.warnings)


def serialize_ttml(doc: CueDocument) -> str:
    """Serialize a document back to TTML; parse_ttml inverts it on modeled fields."""
    if not isinstance(doc, CueDocument):
        raise InvariantViolation("serialize_ttml expects a CueDocument")
    root = ET.Element(f"{{{TT_NS}}}tt")
    head = ET.SubElement(root, f"{{{TT_NS}}}head")
    if doc.easy_to_read_content_type:
        metadata = ET.SubElement(head, f"{{{TT_NS}}}metadata")
        doc_meta = ET.SubElement(metadata, f"{{{EBUTTM_NS}}}documentMetadata")
        content_type = ET.SubElement(doc_meta, f"{{{EBUTTM_NS}}}documentContentType")
        content_type.text = "easyToRead"
    if doc.styles:
        styling = ET.SubElement(head, f"{{{TT_NS}}}styling")
        for style in doc.styles:
            el = ET.SubElement(styling, f"{{{TT_NS}}}style",
                               {f"{{{XML_NS}}}id": style.id})
            if style.imac_type is not None:
                el.set(f"{{{IMAC_NS}}}type", style.imac_type)
            for attr, value in (("textAlign", style.text_align), ("color", style.color),
                                ("backgroundColor", style.background_color),
                                ("fontSize", style.font_size)):
                if value is not None:
                    el.set(f"{{{TTS_NS}}}{attr}", value)
    if doc.regions:
        layout = ET.SubElement(head, f"{{{TT_NS}}}layout")
        for region in doc.regions:
            ET.SubElement(layout, f"{{{TT_NS}}}region", {
                f"{{{XML_NS}}}id": region.id,
                f"{{{TTS_NS}}}origin": (f"{_format_number(region.origin[0])}% "
                                        f"{_format_number(region.origin[1])}%"),
                f"{{{TTS_NS}}}extent": (f"{_format_number(region.extent[0])}% "
                                        f"{_format_number(region.extent[1])}%"),
            })
    body = ET.SubElement(root, f"{{{TT_NS}}}body")
    div = ET.SubElement(body, f"{{{TT_NS}}}div")
    for cue in doc.cues:
        p = ET.SubElement(div, f"{{{TT_NS}}}p", {f"{{{XML_NS}}}id": cue.id})
        if cue.region_id is not None:
            p.set("region", cue.region_id)
        if cue.style_id is not None:
            p.set("style", cue.style_id)
        p.set("begin", cue.begin.to_clock())
        p.set("end", cue.end.to_clock())
        if cue.direction is not None:
            if cue.source_attrs is DirectionFamily.AUDIO_SOURCE:
                p.set(f"{{{IMAC_NS}}}audioSourceAzimuth",
                      _format_number(cue.direction.azimuth))
                p.set(f"{{{IMAC_NS}}}audioSourceElevation",
                      _format_number(cue.direction.elevation))
            else:
                longitude, latitude = direction_to_longitude_latitude(cue.direction)
                p.set(f"{{{IMAC_NS}}}equirectangularLongitude", _format_number(longitude))
                p.set(f"{{{IMAC_NS}}}equirectangularLatitude", _format_number(latitude))
        for span in cue.spans:
            span_el = ET.SubElement(p, f"{{{TT_NS}}}span")
            if span.style_id is not None:
                span_el.set("style", span.style_id)
            span_el.text = span.text
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode")
