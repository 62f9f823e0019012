"""Classification and validation of access services signaled in a manifest.

classify() reduces a MediaPresentation to the services a player UI needs:
subtitle tracks (with hard-of-hearing and easy-to-read flags), audio services
(main audio, audio description, spoken subtitles, with their mix variants and
ambisonic layout) and sign-language video/metadata pairs. validate() applies
the rule table documented below. select_streams() resolves user preferences
to concrete adaptation sets.

Validation rules
    R1  sign video without a resolvable metadata link            Error
    R2  sign-metadata set with wrong mime/content type           Error
    R3  receiver-mix audio without dependent representations     Error
    R4  audio-description gain/mode outside the vocabulary       Error
    R5  TVA AudioPurpose Accessibility value not a positive int  Warning
    R6  ambisonic channel-map violations                         Error/Warning
    R7  easy-to-read marker on a non-subtitle set                Warning
    R8  sidecar document with out-of-range direction angles      Error
    R9  sidecar labeled easy-to-read but MPD does not signal it  Warning
    R10 overlapping segments in a sign-metadata sidecar          Warning
    R11 sidecar supplied for an unknown adaptation set           Warning

Classification diagnostics use rule ids C1..C8 (see _warn call sites).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from . import ambisonics
from .ambisonics import AmbisonicChannelMap, format_channel_map
from .errors import Access360Error, RangeError
from .geometry import IndicatorStyle
from .manifest import (
    GAIN_VALUES,
    MODE_VALUES,
    AdaptationSet,
    AdVariant,
    MediaPresentation,
)
from .timedtext import CueDocument

ROLE_SCHEME = "urn:mpeg:dash:role:2011"
TVA_AUDIO_PURPOSE_SCHEME = "urn:tva:metadata:cs:AudioPurposeCS:2007"
IMAC_ACCESS_SCHEME = "urn:imac:access-identifier:2019"
SIGNER_METADATA_LINK_SCHEME = "urn:imac:signer-metadata-adaptation-set-id:2019"

TVA_VISUALLY_IMPAIRED = "1"
TVA_HARD_OF_HEARING = "2"
EASY_TO_READ_VALUE = "easy-to-read"
AUDIO_SUBTITLES_VALUE = "audio-subtitles"
AUDIO_DESCRIPTION_VALUE = "audio-description"
SIGN_METADATA_VALUE = "sign-metadata"

_POSITIVE_INT_RE = re.compile(r"^[1-9][0-9]*$")


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    rule_id: str
    element_path: str
    message: str

    def to_json_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "ruleId": self.rule_id,
            "elementPath": self.element_path,
            "message": self.message,
        }


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "findings", tuple(self.findings))

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.ERROR)

    def has_errors(self) -> bool:
        return any(f.severity is Severity.ERROR for f in self.findings)

    def to_json_dict(self) -> dict:
        return {"findings": [f.to_json_dict() for f in self.findings]}


class SubtitleRoleValue(str, Enum):
    MAIN = "main"
    ALTERNATE = "alternate"
    COMMENTARY = "commentary"


class AudioKind(str, Enum):
    MAIN_AUDIO = "mainAudio"
    AUDIO_DESCRIPTION = "audioDescription"
    SPOKEN_SUBTITLES = "spokenSubtitles"


class MixType(str, Enum):
    BROADCAST_MIX = "broadcastMix"
    RECEIVER_MIX = "receiverMix"
    NOT_APPLICABLE = "notApplicable"


@dataclass(frozen=True)
class SubtitleService:
    adaptation_set_id: str
    lang: str
    role: SubtitleRoleValue
    hard_of_hearing: bool
    easy_to_read: bool

    def to_json_dict(self) -> dict:
        return {
            "adaptationSetId": self.adaptation_set_id,
            "lang": self.lang,
            "role": self.role.value,
            "hardOfHearing": self.hard_of_hearing,
            "easyToRead": self.easy_to_read,
        }


@dataclass(frozen=True)
class AdVariantEntry:
    """One selectable mix variant: where it lives plus its gain/mode."""

    adaptation_set_id: str
    representation_id: str
    variant: AdVariant

    def to_json_dict(self) -> dict:
        data = {
            "adaptationSetId": self.adaptation_set_id,
            "representationId": self.representation_id,
            "gain": self.variant.gain,
            "mode": self.variant.mode,
        }
        if self.variant.narrative is not None:
            data["narrative"] = self.variant.narrative
        return data


@dataclass(frozen=True)
class AudioService:
    adaptation_set_id: str
    lang: str
    kind: AudioKind
    mix: MixType
    variants: tuple[AdVariantEntry, ...] = ()
    ambisonic: AmbisonicChannelMap | None = None

    def __post_init__(self):
        object.__setattr__(self, "variants", tuple(self.variants))

    def to_json_dict(self) -> dict:
        ambi = None
        if self.ambisonic is not None:
            ambi = {
                "entries": format_channel_map(self.ambisonic.entries),
                "strength": self.ambisonic.strength.value,
            }
        return {
            "adaptationSetId": self.adaptation_set_id,
            "lang": self.lang,
            "kind": self.kind.value,
            "mix": self.mix.value,
            "variants": [v.to_json_dict() for v in self.variants],
            "ambisonic": ambi,
        }


@dataclass(frozen=True)
class SignLanguageService:
    video_adaptation_set_id: str
    metadata_adaptation_set_id: str
    sign_lang: str
    metadata_lang: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "videoAdaptationSetId": self.video_adaptation_set_id,
            "metadataAdaptationSetId": self.metadata_adaptation_set_id,
            "signLang": self.sign_lang,
            "metadataLang": self.metadata_lang,
        }


@dataclass(frozen=True)
class AccessServiceCatalog:
    subtitles: tuple[SubtitleService, ...] = ()
    audio: tuple[AudioService, ...] = ()
    sign_language: tuple[SignLanguageService, ...] = ()
    warnings: tuple[Finding, ...] = ()

    def __post_init__(self):
        for name in ("subtitles", "audio", "sign_language", "warnings"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def to_json_dict(self) -> dict:
        return {
            "subtitles": [s.to_json_dict() for s in self.subtitles],
            "audio": [a.to_json_dict() for a in self.audio],
            "signLanguage": [s.to_json_dict() for s in self.sign_language],
            "warnings": [w.to_json_dict() for w in self.warnings],
        }


def _set_path(aset: AdaptationSet, index: int) -> str:
    if aset.id is not None:
        return f"AdaptationSet[@id='{aset.id}']"
    return f"AdaptationSet[{index}]"


def _role_value(aset: AdaptationSet) -> str | None:
    for desc in aset.roles:
        if desc.scheme_id_uri == ROLE_SCHEME:
            return desc.value
    return None


def _tva_values(aset: AdaptationSet) -> list[str]:
    return [d.value for d in aset.accessibility
            if d.scheme_id_uri == TVA_AUDIO_PURPOSE_SCHEME]


def _imac_access_values(aset: AdaptationSet) -> list[str]:
    return [d.value for d in aset.accessibility
            if d.scheme_id_uri == IMAC_ACCESS_SCHEME]


def _is_sign_metadata(aset: AdaptationSet) -> bool:
    return aset.has_role(IMAC_ACCESS_SCHEME, SIGN_METADATA_VALUE)


def _is_sign_video(aset: AdaptationSet) -> bool:
    return aset.has_role(ROLE_SCHEME, "sign")


def _is_subtitle(aset: AdaptationSet) -> bool:
    if aset.mime_type == "application/mp4":
        return any((rep.codecs or "").startswith("stpp") for rep in aset.representations)
    if aset.mime_type == "application/ttml+xml":
        return not _is_sign_metadata(aset)
    return False


def _is_audio(aset: AdaptationSet) -> bool:
    return aset.mime_type == "audio/mp4"


def _signer_link(aset: AdaptationSet) -> str | None:
    for desc in aset.property_descriptors():
        if desc.scheme_id_uri == SIGNER_METADATA_LINK_SCHEME:
            return desc.value
    return None


def _mix_for(role: str | None) -> MixType:
    if role == "alternate":
        return MixType.BROADCAST_MIX
    if role == "commentary":
        return MixType.RECEIVER_MIX
    return MixType.NOT_APPLICABLE


def classify(mp: MediaPresentation) -> AccessServiceCatalog:
    """Classify every adaptation set into at most one access-service record.

    Classification is total: sets that do not match any service pattern are
    reported in the catalog warnings, never rejected. Audio-description and
    spoken-subtitle sets that only differ in their mix variant (one set per
    gain/mode combination) are folded into a single service whose variants
    list all selectable mixes.
    """
    warnings: list[Finding] = []

    def warn(rule: str, path: str, message: str,
             severity: Severity = Severity.WARNING) -> None:
        warnings.append(Finding(severity, rule, path, message))

    subtitles: list[SubtitleService] = []
    audio: list[AudioService] = []
    sign_language: list[SignLanguageService] = []
    audio_groups: dict[tuple, int] = {}
    referenced_metadata: set[str] = set()

    for index, aset in enumerate(mp.adaptation_sets):
        path = _set_path(aset, index)
        for desc in aset.accessibility:
            if desc.scheme_id_uri == ROLE_SCHEME and desc.value == "sign":
                warn("C8", path,
                     "draft-status Accessibility element with role scheme value "
                     "'sign' accepted", Severity.INFO)

        if _is_sign_video(aset):
            link = _signer_link(aset)
            target = mp.adaptation_set(link) if link else None
            if link is None or target is None or not _is_sign_metadata(target):
                warn("C4", path, "sign video without a resolvable metadata link; "
                                 "set left unclassified")
                continue
            if aset.id is None:
                warn("C4", path, "sign video set without an id cannot be cataloged")
                continue
            sign_language.append(SignLanguageService(
                video_adaptation_set_id=aset.id,
                metadata_adaptation_set_id=target.id,
                sign_lang=aset.lang or "und",
                metadata_lang=target.lang,
            ))
            referenced_metadata.add(target.id)
            continue

        if _is_sign_metadata(aset):
            continue  # consumed (or reported as orphan) after the loop

        if _is_subtitle(aset):
            role_raw = _role_value(aset)
            try:
                role = SubtitleRoleValue(role_raw) if role_raw else SubtitleRoleValue.MAIN
            except ValueError:
                warn("C2", path, f"unknown subtitle role {role_raw!r}; assuming main")
                role = SubtitleRoleValue.MAIN
            if aset.id is None:
                warn("C1", path, "subtitle set without an id cannot be cataloged")
                continue
            subtitles.append(SubtitleService(
                adaptation_set_id=aset.id,
                lang=aset.lang or "und",
                role=role,
                hard_of_hearing=aset.has_accessibility(TVA_AUDIO_PURPOSE_SCHEME,
                                                       TVA_HARD_OF_HEARING),
                easy_to_read=aset.has_accessibility(IMAC_ACCESS_SCHEME,
                                                    EASY_TO_READ_VALUE),
            ))
            continue

        if _is_audio(aset):
            service = _audio_service(aset, path, index, warn)
            if service is None:
                continue
            key = (service.kind, service.mix, service.lang)
            if service.variants and key in audio_groups:
                anchor = audio[audio_groups[key]]
                audio[audio_groups[key]] = AudioService(
                    adaptation_set_id=anchor.adaptation_set_id,
                    lang=anchor.lang,
                    kind=anchor.kind,
                    mix=anchor.mix,
                    variants=anchor.variants + service.variants,
                    ambisonic=anchor.ambisonic or service.ambisonic,
                )
            else:
                if service.variants:
                    audio_groups[key] = len(audio)
                audio.append(service)
            continue

        warn("C1", path, f"adaptation set (mimeType={aset.mime_type!r}) is not a "
                         "recognized access service")

    for index, aset in enumerate(mp.adaptation_sets):
        if _is_sign_metadata(aset):
            if aset.id is None or aset.id not in referenced_metadata:
                warn("C3", _set_path(aset, index),
                     "sign-metadata set is not referenced by any sign video")

    return AccessServiceCatalog(tuple(subtitles), tuple(audio),
                                tuple(sign_language), tuple(warnings))


def _audio_service(aset: AdaptationSet, path: str, index: int, warn) -> AudioService | None:
    tva = _tva_values(aset)
    imac_values = _imac_access_values(aset)
    role = _role_value(aset)
    if TVA_VISUALLY_IMPAIRED in tva:
        kind = (AudioKind.SPOKEN_SUBTITLES if AUDIO_SUBTITLES_VALUE in imac_values
                else AudioKind.AUDIO_DESCRIPTION)
    else:
        if AUDIO_SUBTITLES_VALUE in imac_values or AUDIO_DESCRIPTION_VALUE in imac_values:
            warn("C5", path, "access-identifier value without the TVA AudioPurpose "
                             "element; treating the set as main audio")
        kind = AudioKind.MAIN_AUDIO
    mix = _mix_for(role) if kind is not AudioKind.MAIN_AUDIO else MixType.NOT_APPLICABLE
    if mix is MixType.RECEIVER_MIX and not any(
            rep.dependency_ids for rep in aset.representations):
        warn("C6", path, "receiver-mix audio without dependent representations; "
                         "set left unclassified")
        return None
    if aset.id is None:
        warn("C1", path, "audio set without an id cannot be cataloged")
        return None
    variants = tuple(
        AdVariantEntry(aset.id, rep.id, rep.imac_ad)
        for rep in aset.representations if rep.imac_ad is not None
    )
    try:
        ambisonic = ambisonics.channel_map_of(aset)
    except ambisonics.ChannelMapError as exc:
        warn("C7", path, f"unparseable ambisonic channel map ignored: {exc}")
        ambisonic = None
    return AudioService(
        adaptation_set_id=aset.id,
        lang=aset.lang or "und",
        kind=kind,
        mix=mix,
        variants=variants,
        ambisonic=ambisonic,
    )


def validate(mp: MediaPresentation,
             sidecars: dict[str, CueDocument | Exception] | None = None) -> ValidationReport:
    """Apply the R1..R11 rule table to a presentation and optional sidecars.

    Sidecar values may be Exception instances for documents that failed to
    parse; range errors from direction attributes surface as rule R8.
    """
    sidecars = sidecars or {}
    findings: list[Finding] = []

    def add(severity: Severity, rule: str, path: str, message: str) -> None:
        findings.append(Finding(severity, rule, path, message))

    for index, aset in enumerate(mp.adaptation_sets):
        path = _set_path(aset, index)

        if _is_sign_video(aset):
            link = _signer_link(aset)
            target = mp.adaptation_set(link) if link else None
            if link is None:
                add(Severity.ERROR, "R1", path,
                    "sign video set carries no signer-metadata link property")
            elif target is None:
                add(Severity.ERROR, "R1", path,
                    f"signer-metadata link {link!r} does not resolve")
            elif not _is_sign_metadata(target):
                add(Severity.ERROR, "R1", path,
                    f"signer-metadata link {link!r} resolves to a set without the "
                    "sign-metadata role")

        if _is_sign_metadata(aset):
            if aset.mime_type != "application/ttml+xml":
                add(Severity.ERROR, "R2", path,
                    f"sign-metadata set must be application/ttml+xml, "
                    f"found {aset.mime_type!r}")
            if aset.content_type is not None and aset.content_type != "application":
                add(Severity.ERROR, "R2", path,
                    f"sign-metadata contentType must be 'application', "
                    f"found {aset.content_type!r}")

        if _is_audio(aset) and _role_value(aset) == "commentary":
            if not any(rep.dependency_ids for rep in aset.representations):
                add(Severity.ERROR, "R3", path,
                    "receiver-mix audio needs at least one representation with "
                    "dependencyId")

        for rep in aset.representations:
            if rep.imac_ad is None:
                continue
            rep_path = f"{path}/Representation[@id='{rep.id}']"
            if rep.imac_ad.gain not in GAIN_VALUES:
                add(Severity.ERROR, "R4", rep_path,
                    f"gain {rep.imac_ad.gain!r} outside vocabulary {GAIN_VALUES}")
            if rep.imac_ad.mode not in MODE_VALUES:
                add(Severity.ERROR, "R4", rep_path,
                    f"mode {rep.imac_ad.mode!r} outside vocabulary {MODE_VALUES}")

        for desc in aset.accessibility:
            if (desc.scheme_id_uri == TVA_AUDIO_PURPOSE_SCHEME
                    and not _POSITIVE_INT_RE.match(desc.value)):
                add(Severity.WARNING, "R5", path,
                    f"TVA AudioPurpose value {desc.value!r} is not a positive integer")

        has_map = any(d.scheme_id_uri == ambisonics.AMBI_MAP_SCHEME
                      for d in (aset.roles + aset.accessibility
                                + aset.property_descriptors()))
        has_map = has_map or any(
            d.scheme_id_uri == ambisonics.AMBI_MAP_SCHEME
            for rep in aset.representations for d in rep.descriptors)
        if has_map:
            for finding in ambisonics.validate_map(aset, path):
                add(Severity.ERROR if finding.error else Severity.WARNING, "R6",
                    finding.element_path, finding.message)

        if (aset.has_accessibility(IMAC_ACCESS_SCHEME, EASY_TO_READ_VALUE)
                and not _is_subtitle(aset)):
            add(Severity.WARNING, "R7", path,
                "easy-to-read marker on a set that is not a subtitle set")

    for set_id in sidecars:
        doc = sidecars[set_id]
        index = next((i for i, aset in enumerate(mp.adaptation_sets)
                      if aset.id == set_id), None)
        if index is None:
            add(Severity.WARNING, "R11", f"AdaptationSet[@id='{set_id}']",
                "sidecar supplied for an adaptation set that does not exist")
            continue
        aset = mp.adaptation_sets[index]
        path = _set_path(aset, index)
        if isinstance(doc, Exception):
            if isinstance(doc, RangeError):
                add(Severity.ERROR, "R8", path,
                    f"sidecar direction annotation out of range: {doc}")
            else:
                add(Severity.ERROR, "R8", path, f"sidecar failed to parse: {doc}")
            continue
        if doc.easy_to_read_content_type and not aset.has_accessibility(
                IMAC_ACCESS_SCHEME, EASY_TO_READ_VALUE):
            add(Severity.WARNING, "R9", path,
                "sidecar declares easy-to-read content but the manifest does not "
                "signal it")
        if _is_sign_metadata(aset):
            for first, second in zip(doc.cues, doc.cues[1:]):
                if second.begin < first.end:
                    add(Severity.WARNING, "R10", path,
                        f"signer segments {first.id!r} and {second.id!r} overlap; "
                        "the latest-starting segment wins at query time")

    return ValidationReport(tuple(findings))


class NoMatch(Access360Error):
    def __init__(self, service: str, criteria: dict):
        self.service = service
        self.criteria = criteria
        detail = ", ".join(f"{k}={v!r}" for k, v in criteria.items() if v is not None)
        super().__init__(f"no {service} stream matches {detail}")


class AmbiguousMatch(Access360Error):
    """Two services tie for one request; valid content should not produce this."""


@dataclass(frozen=True)
class SubtitlePrefs:
    lang: str
    easy_to_read: bool = False
    indicator_style: IndicatorStyle = IndicatorStyle.ARROW


@dataclass(frozen=True)
class AdPrefs:
    lang: str
    gain: str | None = None
    mode: str | None = None


@dataclass(frozen=True)
class AstPrefs:
    lang: str


@dataclass(frozen=True)
class SlPrefs:
    sign_lang: str
    hide_when_inactive: bool = False


@dataclass(frozen=True)
class UserPreferences:
    subtitle: SubtitlePrefs | None = None
    audio_description: AdPrefs | None = None
    spoken_subtitles: AstPrefs | None = None
    sign_language: SlPrefs | None = None

    def __post_init__(self):
        if self.audio_description is not None and self.spoken_subtitles is not None:
            raise InvalidPreferences(
                "audio description and spoken subtitles are mutually exclusive")


class InvalidPreferences(Access360Error):
    pass


@dataclass(frozen=True)
class StreamSelection:
    subtitle_as: str | None = None
    audio_as: str | None = None
    sl_video_as: str | None = None
    sl_metadata_as: str | None = None
    representation_ids: dict[str, str] = field(default_factory=dict)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "representation_ids", dict(self.representation_ids))
        object.__setattr__(self, "warnings", tuple(self.warnings))

    def to_json_dict(self) -> dict:
        return {
            "subtitleAs": self.subtitle_as,
            "audioAs": self.audio_as,
            "slVideoAs": self.sl_video_as,
            "slMetadataAs": self.sl_metadata_as,
            "representationIds": dict(self.representation_ids),
        }


def _pick(candidates: list, service: str, key, warnings: list[str]):
    if not candidates:
        return None
    if len(candidates) > 1:
        candidates = sorted(candidates, key=key)
        warnings.append(f"{service}: {len(candidates)} candidates tie; picked "
                        f"{key(candidates[0])!r} by lexicographic id")
    return candidates[0]


def select_streams(cat: AccessServiceCatalog, prefs: UserPreferences) -> StreamSelection:
    """Resolve user preferences to concrete adaptation sets.

    Matching is exact on every requested property; a request nothing
    satisfies raises NoMatch. Ties (invalid content) are broken by
    lexicographic adaptation-set id and recorded in the selection warnings.
    """
    warnings: list[str] = []
    subtitle_as = audio_as = sl_video_as = sl_metadata_as = None
    representation_ids: dict[str, str] = {}

    if prefs.subtitle is not None:
        matches = [s for s in cat.subtitles
                   if s.lang == prefs.subtitle.lang
                   and s.easy_to_read == prefs.subtitle.easy_to_read]
        chosen = _pick(matches, "subtitle", lambda s: s.adaptation_set_id, warnings)
        if chosen is None:
            raise NoMatch("subtitle", {"lang": prefs.subtitle.lang,
                                       "easyToRead": prefs.subtitle.easy_to_read})
        subtitle_as = chosen.adaptation_set_id

    if prefs.audio_description is not None:
        audio_as, rep_id = _select_audio(
            cat, AudioKind.AUDIO_DESCRIPTION, prefs.audio_description.lang,
            prefs.audio_description.gain, prefs.audio_description.mode, warnings)
        if rep_id is not None:
            representation_ids["audio"] = rep_id

    if prefs.spoken_subtitles is not None:
        audio_as, rep_id = _select_audio(
            cat, AudioKind.SPOKEN_SUBTITLES, prefs.spoken_subtitles.lang,
            None, None, warnings)
        if rep_id is not None:
            representation_ids["audio"] = rep_id

    if prefs.sign_language is not None:
        matches = [s for s in cat.sign_language
                   if s.sign_lang == prefs.sign_language.sign_lang]
        chosen = _pick(matches, "sign language",
                       lambda s: s.video_adaptation_set_id, warnings)
        if chosen is None:
            raise NoMatch("sign language",
                          {"signLang": prefs.sign_language.sign_lang})
        sl_video_as = chosen.video_adaptation_set_id
        sl_metadata_as = chosen.metadata_adaptation_set_id

    return StreamSelection(subtitle_as, audio_as, sl_video_as, sl_metadata_as,
                           representation_ids, tuple(warnings))


def _select_audio(cat: AccessServiceCatalog, kind: AudioKind, lang: str,
                  gain: str | None, mode: str | None,
                  warnings: list[str]) -> tuple[str, str | None]:
    service_name = ("audio description" if kind is AudioKind.AUDIO_DESCRIPTION
                    else "spoken subtitles")
    criteria = {"lang": lang, "gain": gain, "mode": mode}
    services = [s for s in cat.audio if s.kind is kind and s.lang == lang]
    service = _pick(services, service_name, lambda s: s.adaptation_set_id, warnings)
    if service is None:
        raise NoMatch(service_name, criteria)
    if gain is None and mode is None:
        if service.variants:
            first = service.variants[0]
            return first.adaptation_set_id, first.representation_id
        return service.adaptation_set_id, None
    matches = [v for v in service.variants
               if (gain is None or v.variant.gain == gain)
               and (mode is None or v.variant.mode == mode)]
    chosen = _pick(matches, service_name, lambda v: v.adaptation_set_id, warnings)
    if chosen is None:
        raise NoMatch(service_name, criteria)
    return chosen.adaptation_set_id, chosen.representation_id
