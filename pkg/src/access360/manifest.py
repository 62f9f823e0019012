"""Data model, parser and serializer for the DASH MPD signaling subset.

The model is deliberately lossy: only the elements and attributes that carry
accessibility signaling are kept. Everything else is dropped on parse and
counted in the presentation's warnings. Namespace handling is URI-based, so
the custom audio-description markup is recognized under any prefix; the
namespace map is normalized at construction so that two documents differing
only in prefixes compare equal.
"""

from __future__ import annotations

import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum

from .errors import Access360Error, InvariantViolation, MalformedXml

DASH_NS = "urn:mpeg:dash:schema:mpd:2011"
IMAC_NS = "http://www.imac-project.eu"
# Some published manifests bind the custom prefix to this placeholder URI
# instead of the project namespace; it is accepted on parse and normalized.
IMAC_PLACEHOLDER_NS = "namespace:for:imac:audiodescription"
IMAC_URIS = (IMAC_NS, IMAC_PLACEHOLDER_NS)

AUDIO_CHANNEL_CONFIG_SCHEME = "urn:mpeg:dash:23003:3:audio_channel_configuration:2011"

GAIN_VALUES = ("low", "medium", "high")
MODE_VALUES = ("classic", "static", "dynamic")

ET.register_namespace("", DASH_NS)
ET.register_namespace("imac", IMAC_NS)


class SchemaViolation(Access360Error):
    """The document is well-formed XML but breaks the modeled MPD schema."""

    def __init__(self, element_path: str, message: str):
        self.element_path = element_path
        super().__init__(f"{element_path}: {message}")


class DescriptorStrength(str, Enum):
    PLAIN = "plain"
    SUPPLEMENTAL = "supplemental"
    ESSENTIAL = "essential"


@dataclass(frozen=True)
class Descriptor:
    """A DASH descriptor: Role/Accessibility (plain) or a property descriptor."""

    scheme_id_uri: str
    value: str = ""
    strength: DescriptorStrength = DescriptorStrength.PLAIN

    def __post_init__(self):
        if not self.scheme_id_uri:
            raise InvariantViolation("descriptor schemeIdUri must be non-empty")


@dataclass(frozen=True)
class AdVariant:
    """Audio-description mix variant (gain/mode, plus free-form narrative).

    Values are kept as raw strings so that out-of-vocabulary signaling
    survives parsing and can be reported by validation; GAIN_VALUES and
    MODE_VALUES list the defined vocabularies.
    """

    gain: str
    mode: str
    narrative: str | None = None

    def __post_init__(self):
        if self.gain is None or self.mode is None:
            raise InvariantViolation("audio-description variant needs both gain and mode")


@dataclass(frozen=True)
class Representation:
    id: str
    bandwidth: int | None = None
    codecs: str | None = None
    dependency_ids: tuple[str, ...] = ()
    audio_channel_count: int | None = None
    imac_ad: AdVariant | None = None
    base_url: str | None = None
    descriptors: tuple[Descriptor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "dependency_ids", tuple(self.dependency_ids))
        object.__setattr__(self, "descriptors", tuple(self.descriptors))
        if any(not dep for dep in self.dependency_ids):
            raise InvariantViolation("dependencyId entries must be non-empty")
        if self.bandwidth is not None and self.bandwidth < 0:
            raise InvariantViolation("bandwidth must be non-negative")
        if self.audio_channel_count is not None and self.audio_channel_count < 1:
            raise InvariantViolation("audio channel count must be >= 1")
        for desc in self.descriptors:
            if desc.strength is DescriptorStrength.PLAIN:
                raise InvariantViolation(
                    "representation-level descriptors must be property descriptors"
                )


@dataclass(frozen=True)
class AdaptationSet:
    id: str | None = None
    lang: str | None = None
    content_type: str | None = None
    mime_type: str | None = None
    roles: tuple[Descriptor, ...] = ()
    accessibility: tuple[Descriptor, ...] = ()
    supplemental_properties: tuple[Descriptor, ...] = ()
    essential_properties: tuple[Descriptor, ...] = ()
    representations: tuple[Representation, ...] = ()

    def __post_init__(self):
        for name in ("roles", "accessibility", "supplemental_properties",
                     "essential_properties", "representations"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.representations:
            raise InvariantViolation("adaptation set needs at least one representation")
        for desc in self.roles + self.accessibility:
            if desc.strength is not DescriptorStrength.PLAIN:
                raise InvariantViolation("Role/Accessibility descriptors are plain")
        for desc in self.supplemental_properties:
            if desc.strength is not DescriptorStrength.SUPPLEMENTAL:
                raise InvariantViolation("SupplementalProperty strength mismatch")
        for desc in self.essential_properties:
            if desc.strength is not DescriptorStrength.ESSENTIAL:
                raise InvariantViolation("EssentialProperty strength mismatch")

    def property_descriptors(self) -> tuple[Descriptor, ...]:
        return self.supplemental_properties + self.essential_properties

    def has_role(self, scheme: str, value: str) -> bool:
        return any(d.scheme_id_uri == scheme and d.value == value for d in self.roles)

    def has_accessibility(self, scheme: str, value: str) -> bool:
        return any(d.scheme_id_uri == scheme and d.value == value
                   for d in self.accessibility)


@dataclass(frozen=True)
class Preselection:
    component_ids: tuple[str, ...]
    lang: str | None = None
    id: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "component_ids", tuple(self.component_ids))
        if not self.component_ids:
            raise InvariantViolation("preselection needs at least one component")
        if any(not cid for cid in self.component_ids):
            raise InvariantViolation("preselection component ids must be non-empty")
        if len(set(self.component_ids)) != len(self.component_ids):
            raise InvariantViolation("duplicate preselection component ids")


def _normalize_namespaces(declared: dict[str, str] | None) -> dict[str, str]:
    normalized = {"": DASH_NS, "imac": IMAC_NS}
    for prefix, uri in (declared or {}).items():
        if uri in IMAC_URIS:
            continue  # canonical "imac" binding already present
        if prefix in ("", "imac"):
            continue  # reserved for the canonical bindings
        normalized[prefix] = uri
    return normalized


@dataclass(frozen=True)
class MediaPresentation:
    """In-memory model of the signaling subset of one MPD."""

    adaptation_sets: tuple[AdaptationSet, ...] = ()
    preselections: tuple[Preselection, ...] = ()
    declared_namespaces: dict[str, str] = field(default_factory=dict)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "adaptation_sets", tuple(self.adaptation_sets))
        object.__setattr__(self, "preselections", tuple(self.preselections))
        object.__setattr__(self, "declared_namespaces",
                           _normalize_namespaces(self.declared_namespaces))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        seen: set[str] = set()
        for aset in self.adaptation_sets:
            if aset.id is None:
                continue
            if aset.id in seen:
                raise InvariantViolation(f"duplicate AdaptationSet id {aset.id!r}")
            seen.add(aset.id)

    def adaptation_set(self, set_id: str) -> AdaptationSet | None:
        for aset in self.adaptation_sets:
            if aset.id == set_id:
                return aset
        return None


def _local(tag: str) -> str:
    return tag.rpartition("}")[2]


def _set_path(aset_id: str | None, index: int) -> str:
    if aset_id is not None:
        return f"MPD/AdaptationSet[@id='{aset_id}']"
    return f"MPD/AdaptationSet[{index}]"


def _descriptor_from(elem: ET.Element, strength: DescriptorStrength, path: str) -> Descriptor:
    scheme = elem.get("schemeIdUri")
    if not scheme:
        raise SchemaViolation(path, f"{_local(elem.tag)} without schemeIdUri")
    return Descriptor(scheme, elem.get("value", ""), strength)


def _optional_int(elem: ET.Element, attr: str, path: str, minimum: int) -> int | None:
    raw = elem.get(attr)
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise SchemaViolation(path, f"{attr}={raw!r} is not an integer") from None
    if value < minimum:
        raise SchemaViolation(path, f"{attr}={value} below minimum {minimum}")
    return value


def _channel_count_from(elem: ET.Element) -> int | None:
    # AudioChannelConfiguration with the MPEG channel scheme carries the count.
    if elem.get("schemeIdUri") != AUDIO_CHANNEL_CONFIG_SCHEME:
        return None
    try:
        count = int(elem.get("value", ""))
    except ValueError:
        return None
    return count if count >= 1 else None


class _Parser:
    def __init__(self):
        self.warnings: list[str] = []
        self.ignored = 0
        self.placeholder_seen = False

    def parse(self, xml_text: str) -> MediaPresentation:
        namespaces: dict[str, str] = {}
        root: ET.Element | None = None
        try:
            for event, payload in ET.iterparse(io.StringIO(xml_text),
                                               events=("start-ns", "start")):
                if event == "start-ns":
                    prefix, uri = payload
                    if uri == IMAC_PLACEHOLDER_NS:
                        self.placeholder_seen = True
                    namespaces[prefix] = uri
                elif root is None:
                    root = payload
        except ET.ParseError as exc:
            raise MalformedXml(str(exc)) from exc
        except ValueError as exc:
            raise MalformedXml(str(exc)) from exc
        if root is None:
            raise MalformedXml("document has no root element")
        if _local(root.tag) != "MPD":
            raise SchemaViolation("/", f"root element is {_local(root.tag)!r}, expected MPD")

        sets: list[AdaptationSet] = []
        preselections: list[Preselection] = []
        periods = 0
        for child in root:
            name = _local(child.tag)
            if name == "Period":
                periods += 1
                for sub in child:
                    self._collect(sub, sets, preselections)
            else:
                self._collect(child, sets, preselections)
        if periods > 1:
            self.warnings.append(f"flattened {periods} Periods into one presentation")
        if self.placeholder_seen:
            self.warnings.append(
                f"namespace {IMAC_PLACEHOLDER_NS!r} normalized to {IMAC_NS!r}"
            )
        if self.ignored:
            self.warnings.append(f"ignored {self.ignored} unmodeled elements")

        seen: dict[str, int] = {}
        for index, aset in enumerate(sets):
            if aset.id is None:
                continue
            if aset.id in seen:
                raise SchemaViolation(_set_path(aset.id, index), "duplicate AdaptationSet id")
            seen[aset.id] = index
        return MediaPresentation(tuple(sets), tuple(preselections), namespaces,
                                 tuple(self.warnings))

    def _collect(self, elem: ET.Element, sets: list[AdaptationSet],
                 preselections: list[Preselection]) -> None:
        name = _local(elem.tag)
        if name == "AdaptationSet":
            sets.append(self._adaptation_set(elem, len(sets)))
        elif name == "Preselection":
            preselections.append(self._preselection(elem, len(preselections)))
        else:
            self.ignored += 1

    def _adaptation_set(self, elem: ET.Element, index: int) -> AdaptationSet:
        path = _set_path(elem.get("id"), index)
        roles: list[Descriptor] = []
        accessibility: list[Descriptor] = []
        supplemental: list[Descriptor] = []
        essential: list[Descriptor] = []
        representations: list[Representation] = []
        set_channel_count: int | None = None
        set_codecs = elem.get("codecs")
        for child in elem:
            name = _local(child.tag)
            if name == "Role":
                roles.append(_descriptor_from(child, DescriptorStrength.PLAIN, path))
            elif name == "Accessibility":
                accessibility.append(_descriptor_from(child, DescriptorStrength.PLAIN, path))
            elif name == "SupplementalProperty":
                supplemental.append(
                    _descriptor_from(child, DescriptorStrength.SUPPLEMENTAL, path))
            elif name == "EssentialProperty":
                essential.append(_descriptor_from(child, DescriptorStrength.ESSENTIAL, path))
            elif name == "Representation":
                representations.append(self._representation(child, path))
            elif name == "AudioChannelConfiguration":
                count = _channel_count_from(child)
                if count is not None:
                    set_channel_count = count
                else:
                    self.ignored += 1
            else:
                self.ignored += 1
        if not representations:
            raise SchemaViolation(path, "AdaptationSet without Representation")
        # codecs and channel count are common attributes: a set-level value
        # applies to every representation that does not override it.
        if set_channel_count is not None or set_codecs is not None:
            representations = [
                Representation(
                    id=rep.id,
                    bandwidth=rep.bandwidth,
                    codecs=rep.codecs if rep.codecs is not None else set_codecs,
                    dependency_ids=rep.dependency_ids,
                    audio_channel_count=(rep.audio_channel_count
                                         if rep.audio_channel_count is not None
                                         else set_channel_count),
                    imac_ad=rep.imac_ad,
                    base_url=rep.base_url,
                    descriptors=rep.descriptors,
                )
                for rep in representations
            ]
        return AdaptationSet(
            id=elem.get("id"),
            lang=elem.get("lang"),
            content_type=elem.get("contentType"),
            mime_type=elem.get("mimeType"),
            roles=tuple(roles),
            accessibility=tuple(accessibility),
            supplemental_properties=tuple(supplemental),
            essential_properties=tuple(essential),
            representations=tuple(representations),
        )

    def _representation(self, elem: ET.Element, set_path: str) -> Representation:
        rep_id = elem.get("id", "")
        path = f"{set_path}/Representation[@id='{rep_id}']"
        bandwidth = _optional_int(elem, "bandwidth", path, 0)
        dependency_ids = tuple((elem.get("dependencyId") or "").split())

        attr_gain = attr_mode = attr_narrative = None
        for uri in IMAC_URIS:
            attr_gain = attr_gain if attr_gain is not None else elem.get(f"{{{uri}}}gain")
            attr_mode = attr_mode if attr_mode is not None else elem.get(f"{{{uri}}}mode")
            attr_narrative = (attr_narrative if attr_narrative is not None
                              else elem.get(f"{{{uri}}}narrative"))

        child_variant: AdVariant | None = None
        channel_count: int | None = None
        base_url: str | None = None
        descriptors: list[Descriptor] = []
        for child in elem:
            name = _local(child.tag)
            uri = child.tag.rpartition("}")[0].lstrip("{")
            if name == "AudioDescription" and uri in IMAC_URIS:
                if child_variant is not None:
                    raise SchemaViolation(path, "more than one AudioDescription element")
                gain, mode = child.get("gain"), child.get("mode")
                if gain is None or mode is None:
                    raise SchemaViolation(path, "AudioDescription needs both gain and mode")
                child_variant = AdVariant(gain, mode, child.get("narrative"))
            elif name == "AudioChannelConfiguration":
                count = _channel_count_from(child)
                if count is not None:
                    channel_count = count
                else:
                    self.ignored += 1
            elif name == "BaseURL":
                base_url = child.text or ""
            elif name == "SupplementalProperty":
                descriptors.append(
                    _descriptor_from(child, DescriptorStrength.SUPPLEMENTAL, path))
            elif name == "EssentialProperty":
                descriptors.append(
                    _descriptor_from(child, DescriptorStrength.ESSENTIAL, path))
            else:
                self.ignored += 1

        attr_variant: AdVariant | None = None
        if attr_gain is not None or attr_mode is not None:
            if attr_gain is None or attr_mode is None:
                raise SchemaViolation(path, "gain and mode attributes must appear together")
            attr_variant = AdVariant(attr_gain, attr_mode, attr_narrative)
        if child_variant is not None and attr_variant is not None:
            raise SchemaViolation(
                path, "AudioDescription signaled both as element and as attributes")

        return Representation(
            id=rep_id,
            bandwidth=bandwidth,
            codecs=elem.get("codecs"),
            dependency_ids=dependency_ids,
            audio_channel_count=channel_count,
            imac_ad=child_variant or attr_variant,
            base_url=base_url,
            descriptors=tuple(descriptors),
        )

    def _preselection(self, elem: ET.Element, index: int) -> Preselection:
        path = f"MPD/Preselection[{index}]"
        components = tuple((elem.get("preselectionComponents") or "").split())
        if not components:
            raise SchemaViolation(path, "preselectionComponents is empty")
        if len(set(components)) != len(components):
            raise SchemaViolation(path, "duplicate preselection component ids")
        return Preselection(components, elem.get("lang"), elem.get("id"))


def parse_mpd(xml_text: str) -> MediaPresentation:
    """Parse an MPD document into the signaling model.

    Raises MalformedXml for non-XML input and SchemaViolation (naming the
    offending element path) when the modeled subset is broken. Elements
    outside the subset are dropped and counted in the result's warnings.
    """
    return _Parser().parse(xml_text)


def _descriptor_element(parent: ET.Element, name: str, desc: Descriptor) -> None:
    attrs = {"schemeIdUri": desc.scheme_id_uri}
    if desc.value != "":
        attrs["value"] = desc.value
    ET.SubElement(parent, f"{{{DASH_NS}}}{name}", attrs)


_PROPERTY_NAMES = {
    DescriptorStrength.SUPPLEMENTAL: "SupplementalProperty",
    DescriptorStrength.ESSENTIAL: "EssentialProperty",
}


def serialize_mpd(mp: MediaPresentation) -> str:
    """Serialize a model back to XML; parse_mpd inverts it on modeled fields.

    Audio-description variants are always emitted in the child-element form
    under the canonical project namespace.
    """
    if not isinstance(mp, MediaPresentation):
        raise InvariantViolation("serialize_mpd expects a MediaPresentation")
    root = ET.Element(f"{{{DASH_NS}}}MPD")
    uses_imac = any(rep.imac_ad is not None
                    for aset in mp.adaptation_sets for rep in aset.representations)
    # ElementTree only declares namespaces that are used; re-declare the rest
    # by hand so the declaration map survives a round trip.
    for prefix in sorted(mp.declared_namespaces):
        uri = mp.declared_namespaces[prefix]
        if prefix == "" or (prefix == "imac" and uses_imac):
            continue
        root.set(f"xmlns:{prefix}" if prefix else "xmlns", uri)

    period = ET.SubElement(root, f"{{{DASH_NS}}}Period")
    for aset in mp.adaptation_sets:
        aset_el = ET.SubElement(period, f"{{{DASH_NS}}}AdaptationSet")
        for attr, value in (("id", aset.id), ("lang", aset.lang),
                            ("contentType", aset.content_type),
                            ("mimeType", aset.mime_type)):
            if value is not None:
                aset_el.set(attr, value)
        for desc in aset.roles:
            _descriptor_element(aset_el, "Role", desc)
        for desc in aset.accessibility:
            _descriptor_element(aset_el, "Accessibility", desc)
        for desc in aset.supplemental_properties:
            _descriptor_element(aset_el, "SupplementalProperty", desc)
        for desc in aset.essential_properties:
            _descriptor_element(aset_el, "EssentialProperty", desc)
        for rep in aset.representations:
            rep_el = ET.SubElement(aset_el, f"{{{DASH_NS}}}Representation", {"id": rep.id})
            if rep.bandwidth is not None:
                rep_el.set("bandwidth", str(rep.bandwidth))
            if rep.codecs is not None:
                rep_el.set("codecs", rep.codecs)
            if rep.dependency_ids:
                rep_el.set("dependencyId", " ".join(rep.dependency_ids))
            for desc in rep.descriptors:
                _descriptor_element(rep_el, _PROPERTY_NAMES[desc.strength], desc)
            if rep.imac_ad is not None:
                ad_el = ET.SubElement(rep_el, f"{{{IMAC_NS}}}AudioDescription",
                                      {"gain": rep.imac_ad.gain, "mode": rep.imac_ad.mode})
                if rep.imac_ad.narrative is not None:
                    ad_el.set("narrative", rep.imac_ad.narrative)
            if rep.audio_channel_count is not None:
                ET.SubElement(rep_el, f"{{{DASH_NS}}}AudioChannelConfiguration",
                              {"schemeIdUri": AUDIO_CHANNEL_CONFIG_SCHEME,
                               "value": str(rep.audio_channel_count)})
            if rep.base_url is not None:
                base_el = ET.SubElement(rep_el, f"{{{DASH_NS}}}BaseURL")
                base_el.text = rep.base_url
    for presel in mp.preselections:
        presel_el = ET.SubElement(period, f"{{{DASH_NS}}}Preselection",
                                  {"preselectionComponents": " ".join(presel.component_ids)})
        if presel.id is not None:
            presel_el.set("id", presel.id)
        if presel.lang is not None:
            presel_el.set("lang", presel.lang)

    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode")
