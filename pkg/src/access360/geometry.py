"""Spherical viewport math for 360-degree scenes.

Coordinate conventions used throughout the package: a right-handed frame
with +X forward, +Z up and +Y to the viewer's left. Azimuth grows clockwise
when seen from above (+X turning toward -Y), elevation grows upward, and the
equirectangular video texture is mapped so that its center projects onto the
+X axis. Equirectangular longitude grows when turning left, so longitude and
azimuth are sign-opposed.

All angles are degrees. The canonical wrapped interval is (-180, 180]; the
tie at +/-180 always resolves to +180.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import Access360Error, RangeError

PLANE_RADIUS = 0.99  # subtitle plane sits just inside the unit video sphere


class LatitudeRange(RangeError):
    """Equirectangular latitude outside [-90, 90]."""

    def __init__(self, value: object):
        super().__init__("latitude", value)


class GimbalDegenerate(Access360Error):
    """The horizontal-parallel plane axis is undefined at |pitch| = 90."""


def wrap_degrees(angle: float) -> float:
    """Wrap an angle into (-180, 180]; the +/-180 tie resolves to +180."""
    r = angle % 360.0
    if r > 180.0:
        r -= 360.0
    return r


def angular_offset(viewport_yaw: float, target_azimuth: float) -> float:
    """Shortest signed offset from the viewport center to a target azimuth.

    Positive means the target lies clockwise (to the viewer's right) of the
    viewport center.
    """
    if not (math.isfinite(viewport_yaw) and math.isfinite(target_azimuth)):
        raise RangeError("angular_offset", (viewport_yaw, target_azimuth), "non-finite input")
    return wrap_degrees(target_azimuth - viewport_yaw)


@dataclass(frozen=True)
class Vec3:
    """A 3D vector with finite components."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise RangeError("Vec3", (self.x, self.y, self.z), "non-finite component")

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def scaled(self, factor: float) -> "Vec3":
        return Vec3(self.x * factor, self.y * factor, self.z * factor)

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise RangeError("Vec3", (self.x, self.y, self.z), "zero vector")
        return self.scaled(1.0 / n)


@dataclass(frozen=True)
class Direction:
    """A speaker/audio-source direction: azimuth in [-180, 180], elevation in [-90, 90].

    An azimuth of -180 is accepted and canonicalized to +180 so that equal
    directions compare equal.
    """

    azimuth: float
    elevation: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.azimuth) and -180.0 <= self.azimuth <= 180.0):
            raise RangeError("azimuth", self.azimuth, "allowed range [-180, 180]")
        if not (math.isfinite(self.elevation) and -90.0 <= self.elevation <= 90.0):
            raise RangeError("elevation", self.elevation, "allowed range [-90, 90]")
        if self.azimuth == -180.0:
            object.__setattr__(self, "azimuth", 180.0)


@dataclass(frozen=True)
class ViewportState:
    """Viewing direction plus field of view, all in degrees."""

    yaw: float
    pitch: float
    hfov: float
    vfov: float

    def __post_init__(self):
        if not (math.isfinite(self.yaw) and -180.0 <= self.yaw <= 180.0):
            raise RangeError("yaw", self.yaw, "allowed range [-180, 180]")
        if not (math.isfinite(self.pitch) and -90.0 <= self.pitch <= 90.0):
            raise RangeError("pitch", self.pitch, "allowed range [-90, 90]")
        if not (math.isfinite(self.hfov) and 0.0 < self.hfov < 360.0):
            raise RangeError("hfov", self.hfov, "allowed range (0, 360)")
        if not (math.isfinite(self.vfov) and 0.0 < self.vfov < 180.0):
            raise RangeError("vfov", self.vfov, "allowed range (0, 180)")


class IndicatorStyle(str, Enum):
    ARROW = "arrow"
    RADAR = "radar"


class IndicatorKind(str, Enum):
    NONE_VISIBLE = "noneVisible"
    ARROW_LEFT = "arrowLeft"
    ARROW_RIGHT = "arrowRight"
    RADAR = "radar"


@dataclass(frozen=True)
class IndicatorCue:
    """Per-frame indicator decision for one directed element."""

    kind: IndicatorKind
    relative_azimuth: float


def direction_to_unit_vector(d: Direction) -> Vec3:
    """Unit vector for a direction; {0, 0} is +X, {0, 90} is +Z, {90, 0} is -Y."""
    a = math.radians(d.azimuth)
    e = math.radians(d.elevation)
    return Vec3(math.cos(e) * math.cos(a), -math.cos(e) * math.sin(a), math.sin(e))


def equirect_uv_to_direction(u: float, v: float) -> Direction:
    """Direction of the sphere point a normalized texture coordinate maps to.

    (0.5, 0.5) is the texture center on +X; u grows rightward across the
    texture (clockwise azimuth), v grows downward (zenith at v=0).
    """
    if not (math.isfinite(u) and 0.0 <= u <= 1.0):
        raise RangeError("u", u, "allowed range [0, 1]")
    if not (math.isfinite(v) and 0.0 <= v <= 1.0):
        raise RangeError("v", v, "allowed range [0, 1]")
    return Direction(wrap_degrees((u - 0.5) * 360.0), (0.5 - v) * 180.0)


def direction_to_equirect_uv(d: Direction) -> tuple[float, float]:
    """Inverse of equirect_uv_to_direction (u reduced mod 1)."""
    return (d.azimuth / 360.0 + 0.5) % 1.0, 0.5 - d.elevation / 180.0


def longitude_latitude_to_direction(longitude: float, latitude: float) -> Direction:
    """Convert equirectangular longitude/latitude angles to a direction.

    Longitude grows when turning left (counterclockwise), so azimuth is the
    wrapped negation of the longitude. Any finite longitude is accepted and
    reduced mod 360.
    """
    if not (math.isfinite(latitude) and -90.0 <= latitude <= 90.0):
        raise LatitudeRange(latitude)
    if not math.isfinite(longitude):
        raise RangeError("longitude", longitude, "non-finite input")
    return Direction(wrap_degrees(-longitude), latitude)


def direction_to_longitude_latitude(d: Direction) -> tuple[float, float]:
    """Inverse of longitude_latitude_to_direction; longitude lands in [0, 360)."""
    return (-d.azimuth) % 360.0, d.elevation


def indicator_for(viewport: ViewportState, d: Direction, style: IndicatorStyle) -> IndicatorCue:
    """Decide the indicator for a directed element under the given viewport.

    Arrow style hides the indicator while the target is horizontally inside
    the field of view and otherwise points toward the shorter turn. Radar
    style is always active and just reports the relative azimuth for mark
    placement. Visibility is horizontal-only: elevation and vfov are ignored.
    """
    rel = angular_offset(viewport.yaw, d.azimuth)
    if style is IndicatorStyle.RADAR:
        return IndicatorCue(IndicatorKind.RADAR, rel)
    if abs(rel) <= viewport.hfov / 2.0:
        return IndicatorCue(IndicatorKind.NONE_VISIBLE, rel)
    if rel > 0.0:
        return IndicatorCue(IndicatorKind.ARROW_RIGHT, rel)
    return IndicatorCue(IndicatorKind.ARROW_LEFT, rel)


def subtitle_plane_anchor(viewport: ViewportState) -> tuple[Vec3, Vec3, Vec3]:
    """Anchor frame of the screen-fixed subtitle plane.

    Returns (plane_center, plane_x_axis, plane_y_axis). The plane sits
    orthogonal to the view vector at radius PLANE_RADIUS; its x axis is unit,
    parallel to the horizontal X-Y plane and points to the viewer's right,
    and the y axis completes the orthonormal frame pointing up along the
    plane.
    """
    if abs(viewport.pitch) == 90.0:
        raise GimbalDegenerate("horizontal-parallel axis undefined at |pitch| = 90")
    view = direction_to_unit_vector(Direction(viewport.yaw, viewport.pitch))
    a = math.radians(viewport.yaw)
    x_axis = Vec3(-math.sin(a), -math.cos(a), 0.0)
    y_axis = x_axis.cross(view).normalized()
    return view.scaled(PLANE_RADIUS), x_axis, y_axis
