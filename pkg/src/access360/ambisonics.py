"""Ambisonic channel-map descriptor handling and preselection resolution.

The descriptor scheme urn:mpeg:dash:ambi-map:2018 maps the channels present
in a stream, in order, to Ambisonic Channel Numbers (ACN) or to head-locked
channels ('M' mono, 'L'/'R' stereo pair). A map may travel as a
SupplementalProperty only when legacy players can safely ignore it: exactly
[0], [M] or the [L R] pair. Anything else must be an EssentialProperty.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import Access360Error, InvariantViolation
from .manifest import AdaptationSet, DescriptorStrength, MediaPresentation, Preselection

AMBI_MAP_SCHEME = "urn:mpeg:dash:ambi-map:2018"

_HEAD_LOCK_TOKENS = ("L", "R", "M")


class ChannelMapError(Access360Error):
    """Base class for channel-map grammar and composition errors."""


class EmptyValue(ChannelMapError):
    pass


class BadToken(ChannelMapError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"bad channel-map token {token!r}")


class DuplicateAcn(ChannelMapError):
    def __init__(self, acn: int):
        self.acn = acn
        super().__init__(f"duplicate ACN {acn}")


class DuplicateToken(ChannelMapError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"head-lock channel {token!r} listed twice")


class MixedHeadLock(ChannelMapError):
    def __init__(self):
        super().__init__("mono head-lock cannot coexist with a stereo pair")


class UnpairedStereo(ChannelMapError):
    def __init__(self):
        super().__init__("head-lock L and R must appear both or neither")


class UnknownComponent(ChannelMapError):
    def __init__(self, set_id: str):
        self.set_id = set_id
        super().__init__(f"preselection component {set_id!r} does not resolve")


class MissingMap(ChannelMapError):
    def __init__(self, set_id: str):
        self.set_id = set_id
        super().__init__(f"adaptation set {set_id!r} carries no channel map")


class DuplicateAcnAcrossComponents(ChannelMapError):
    def __init__(self, acn: int):
        self.acn = acn
        super().__init__(f"ACN {acn} contributed by more than one component")


class ConflictingHeadLock(ChannelMapError):
    def __init__(self):
        super().__init__("components contribute conflicting head-lock channels")


@dataclass(frozen=True)
class ChannelRole:
    """One stream channel: either ACN(n) or a head-lock channel L/R/M."""

    token: str

    def __post_init__(self):
        if self.token not in _HEAD_LOCK_TOKENS and not self._is_acn_token(self.token):
            raise BadToken(self.token)

    @staticmethod
    def _is_acn_token(token: str) -> bool:
        return token.isascii() and token.isdigit()

    @classmethod
    def acn(cls, n: int) -> "ChannelRole":
        if n < 0:
            raise BadToken(str(n))
        return cls(str(n))

    @property
    def is_head_lock(self) -> bool:
        return self.token in _HEAD_LOCK_TOKENS

    @property
    def acn_index(self) -> int | None:
        return int(self.token) if not self.is_head_lock else None


HEAD_LOCK_LEFT = ChannelRole("L")
HEAD_LOCK_RIGHT = ChannelRole("R")
HEAD_LOCK_MONO = ChannelRole("M")


def _check_entries(entries: tuple[ChannelRole, ...]) -> None:
    seen_acn: set[int] = set()
    counts = {token: 0 for token in _HEAD_LOCK_TOKENS}
    for entry in entries:
        if entry.is_head_lock:
            counts[entry.token] += 1
        else:
            if entry.acn_index in seen_acn:
                raise DuplicateAcn(entry.acn_index)
            seen_acn.add(entry.acn_index)
    for token in _HEAD_LOCK_TOKENS:
        if counts[token] > 1:
            raise DuplicateToken(token)
    if counts["M"] and (counts["L"] or counts["R"]):
        raise MixedHeadLock()
    if counts["L"] != counts["R"]:
        raise UnpairedStereo()


@dataclass(frozen=True)
class AmbisonicChannelMap:
    """An ordered channel map together with the strength it was signaled at."""

    entries: tuple[ChannelRole, ...]
    strength: DescriptorStrength

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise EmptyValue("channel map has no entries")
        if self.strength not in (DescriptorStrength.SUPPLEMENTAL, DescriptorStrength.ESSENTIAL):
            raise InvariantViolation("channel-map strength is supplemental or essential")
        _check_entries(self.entries)


class HeadLock(str, Enum):
    NONE = "none"
    MONO = "mono"
    STEREO_PAIR = "stereoPair"


class StrengthRule(str, Enum):
    SUPPLEMENTAL_ALLOWED = "supplementalAllowed"
    ESSENTIAL_REQUIRED = "essentialRequired"


@dataclass(frozen=True)
class ResolvedLayout:
    """Combined channel layout of one resolved preselection."""

    acn_indices: tuple[int, ...]
    head_lock: HeadLock
    source_sets: tuple[str, ...]
    lang: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "acn_indices", tuple(sorted(self.acn_indices)))
        object.__setattr__(self, "source_sets", tuple(self.source_sets))
        if len(set(self.acn_indices)) != len(self.acn_indices):
            raise InvariantViolation("duplicate ACN indices in resolved layout")

    def to_json_dict(self) -> dict:
        return {
            "acnIndices": list(self.acn_indices),
            "headLock": self.head_lock.value,
            "sourceSets": list(self.source_sets),
            "lang": self.lang,
        }


def parse_channel_map(value: str) -> tuple[ChannelRole, ...]:
    """Parse a descriptor value into channel roles.

    Tokens may be separated by commas, whitespace or a mixture of both; the
    canonical emitted form is space-separated.
    """
    tokens = [t for t in value.replace(",", " ").split() if t]
    if not tokens:
        raise EmptyValue(f"channel-map value {value!r} has no tokens")
    result = tuple(ChannelRole(token) for token in tokens)
    _check_entries(result)
    return result


def format_channel_map(entries: tuple[ChannelRole, ...]) -> str:
    """Canonical space-separated text form, preserving entry order."""
    return " ".join(entry.token for entry in entries)


_SUPPLEMENTAL_WHITELIST = (
    frozenset({"0"}),
    frozenset({"M"}),
    frozenset({"L", "R"}),
)


def required_strength(entries: tuple[ChannelRole, ...]) -> StrengthRule:
    """Whether a map may travel as SupplementalProperty or must be Essential.

    Supplemental is allowed exactly for [ACN 0], [M] and the [L R] pair (in
    any order); every other content requires an EssentialProperty.
    """
    tokens = frozenset(entry.token for entry in entries)
    if len(tokens) == len(entries) and tokens in _SUPPLEMENTAL_WHITELIST:
        return StrengthRule.SUPPLEMENTAL_ALLOWED
    return StrengthRule.ESSENTIAL_REQUIRED


@dataclass(frozen=True)
class MapFinding:
    """One channel-map validation finding; error=False marks advisories."""

    error: bool
    element_path: str
    message: str


def _map_descriptors(aset: AdaptationSet, set_path: str):
    for desc in aset.property_descriptors():
        if desc.scheme_id_uri == AMBI_MAP_SCHEME:
            yield desc, set_path, None
    for rep in aset.representations:
        rep_path = f"{set_path}/Representation[@id='{rep.id}']"
        for desc in rep.descriptors:
            if desc.scheme_id_uri == AMBI_MAP_SCHEME:
                yield desc, rep_path, rep


def validate_map(aset: AdaptationSet, set_path: str | None = None) -> list[MapFinding]:
    """Check every channel-map descriptor carried by one adaptation set.

    Verifies the strength rule, that the map is only carried by property
    descriptors, and that declared audio channel counts match the map length.
    """
    path = set_path or f"AdaptationSet[@id='{aset.id}']"
    findings: list[MapFinding] = []
    for desc in aset.roles + aset.accessibility:
        if desc.scheme_id_uri == AMBI_MAP_SCHEME:
            findings.append(MapFinding(
                True, path,
                "channel map must be a Supplemental or Essential property, "
                "not a Role/Accessibility element"))
    for desc, desc_path, rep in _map_descriptors(aset, path):
        try:
            entries = parse_channel_map(desc.value)
        except ChannelMapError as exc:
            findings.append(MapFinding(True, desc_path, f"unparseable channel map: {exc}"))
            continue
        rule = required_strength(entries)
        if (rule is StrengthRule.ESSENTIAL_REQUIRED
                and desc.strength is not DescriptorStrength.ESSENTIAL):
            findings.append(MapFinding(
                True, desc_path,
                f"map '{format_channel_map(entries)}' must be signaled as an "
                "EssentialProperty"))
        elif (rule is StrengthRule.SUPPLEMENTAL_ALLOWED
                and desc.strength is DescriptorStrength.ESSENTIAL):
            findings.append(MapFinding(
                False, desc_path,
                f"map '{format_channel_map(entries)}' may be a SupplementalProperty; "
                "Essential signaling drops backward compatibility"))
        reps = [rep] if rep is not None else list(aset.representations)
        for candidate in reps:
            if (candidate.audio_channel_count is not None
                    and candidate.audio_channel_count != len(entries)):
                findings.append(MapFinding(
                    True, f"{path}/Representation[@id='{candidate.id}']",
                    f"channel map has {len(entries)} entries but the representation "
                    f"declares {candidate.audio_channel_count} channels"))
    return findings


def channel_map_of(aset: AdaptationSet) -> AmbisonicChannelMap | None:
    """First parseable channel map of a set (set level first, then reps)."""
    for desc, _path, _rep in _map_descriptors(aset, ""):
        entries = parse_channel_map(desc.value)
        return AmbisonicChannelMap(entries, desc.strength)
    return None


def resolve_preselection(mp: MediaPresentation, preselection: Preselection) -> ResolvedLayout:
    """Combine the channel maps of a preselection's components.

    Components are concatenated in preselectionComponents order; the combined
    layout must not repeat an ACN and may contain at most one head-lock
    configuration.
    """
    acn_indices: list[int] = []
    left = right = mono = 0
    for set_id in preselection.component_ids:
        aset = mp.adaptation_set(set_id)
        if aset is None:
            raise UnknownComponent(set_id)
        channel_map = channel_map_of(aset)
        if channel_map is None:
            raise MissingMap(set_id)
        for entry in channel_map.entries:
            if entry.is_head_lock:
                left += entry.token == "L"
                right += entry.token == "R"
                mono += entry.token == "M"
            else:
                if entry.acn_index in acn_indices:
                    raise DuplicateAcnAcrossComponents(entry.acn_index)
                acn_indices.append(entry.acn_index)
    if mono > 1 or left > 1 or right > 1 or (mono and (left or right)):
        raise ConflictingHeadLock()
    if mono:
        head_lock = HeadLock.MONO
    elif left and right:
        head_lock = HeadLock.STEREO_PAIR
    else:
        head_lock = HeadLock.NONE
    return ResolvedLayout(tuple(sorted(acn_indices)), head_lock,
                          preselection.component_ids, preselection.lang)
