"""Accessibility signaling toolkit for 360-degree streaming.

Parses, validates and generates the DASH manifest and TTML cue extensions
used to signal subtitles, audio description, spoken subtitles and sign
language in 360-degree services, implements the viewport geometry for
indicator placement, and simulates per-frame presentation decisions over
scripted viewport traces.
"""

from .ambisonics import (
    AmbisonicChannelMap,
    ChannelRole,
    HeadLock,
    ResolvedLayout,
    StrengthRule,
    format_channel_map,
    parse_channel_map,
    required_strength,
    resolve_preselection,
    validate_map,
)
from .catalog import (
    AccessServiceCatalog,
    AdPrefs,
    AstPrefs,
    AudioKind,
    AudioService,
    Finding,
    MixType,
    NoMatch,
    Severity,
    SignLanguageService,
    SlPrefs,
    StreamSelection,
    SubtitlePrefs,
    SubtitleService,
    UserPreferences,
    ValidationReport,
    classify,
    select_streams,
    validate,
)
from .errors import Access360Error, InvariantViolation, MalformedXml, RangeError
from .geometry import (
    Direction,
    IndicatorCue,
    IndicatorKind,
    IndicatorStyle,
    Vec3,
    ViewportState,
    angular_offset,
    direction_to_longitude_latitude,
    direction_to_unit_vector,
    equirect_uv_to_direction,
    indicator_for,
    longitude_latitude_to_direction,
    subtitle_plane_anchor,
    wrap_degrees,
)
from .manifest import (
    AdaptationSet,
    AdVariant,
    Descriptor,
    DescriptorStrength,
    MediaPresentation,
    Preselection,
    Representation,
    SchemaViolation,
    parse_mpd,
    serialize_mpd,
)
from .simulator import (
    RenderDirective,
    TraceSample,
    ViewportTrace,
    prefs_from_json,
    read_directives,
    simulate,
    trace_from_json,
    write_directives,
)
from .timedtext import (
    Cue,
    CueDocument,
    MediaTime,
    Region,
    SignerState,
    Span,
    Style,
    active_cues,
    annotate_direction,
    cue_color,
    parse_ttml,
    serialize_ttml,
    signer_state,
)

__version__ = "0.1.0"
