"""Acceptance suite: one test per release criterion, one PASS line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the PASS lines and
timings on the console.
"""

from __future__ import annotations

import itertools
import math
import random
import time

from access360.ambisonics import (
    ChannelMapError,
    HeadLock,
    StrengthRule,
    parse_channel_map,
    required_strength,
    resolve_preselection,
    validate_map,
)
from access360.catalog import Severity, SlPrefs, SubtitlePrefs, UserPreferences, validate
from access360.cli import main as cli_main
from access360.geometry import (
    Direction,
    IndicatorKind,
    IndicatorStyle,
    direction_to_longitude_latitude,
    direction_to_unit_vector,
    equirect_uv_to_direction,
    longitude_latitude_to_direction,
    wrap_degrees,
)
from access360.manifest import parse_mpd, serialize_mpd
from access360.simulator import TraceSample, ViewportTrace, simulate, write_directives
from access360.timedtext import MediaTime, parse_ttml, serialize_ttml
from conftest import fixture_path, fixture_text

GOLDEN_MPDS = (
    "easy_to_read.mpd",
    "ambisonic_order0.mpd",
    "ambisonic_order1_headlock.mpd",
    "ambisonic_order1_backcompat.mpd",
    "audio_description.mpd",
    "sign_language.mpd",
    "combined_360.mpd",
)
GOLDEN_TTMLS = ("subtitle_360.ttml", "signer_metadata.ttml")

BROKEN_EXPECTATIONS = {
    "broken/r1_broken_link.mpd": "R1",
    "broken/r1_missing_link.mpd": "R1",
    "broken/r2_wrong_mime.mpd": "R2",
    "broken/r2_wrong_content_type.mpd": "R2",
    "broken/r3_receiver_mix.mpd": "R3",
    "broken/r4_bad_gain.mpd": "R4",
    "broken/r4_bad_mode.mpd": "R4",
    "broken/r5_bad_tva.mpd": "R5",
    "broken/r6_strength.mpd": "R6",
    "broken/r6_count.mpd": "R6",
    "broken/r6_bad_token.mpd": "R6",
    "broken/r7_easy_on_audio.mpd": "R7",
}


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False


def _report(number: int, timer: _Timer, summary: str) -> None:
    print(f"[acceptance] criterion {number}: PASS ({timer.elapsed:.2f}s) - {summary}")


def test_criterion_1_golden_fixtures_round_trip():
    with _Timer() as timer:
        for name in GOLDEN_MPDS:
            mp = parse_mpd(fixture_text(name))
            assert not validate(mp).has_errors(), name
            assert parse_mpd(serialize_mpd(mp)) == mp, name
        for name in GOLDEN_TTMLS:
            doc = parse_ttml(fixture_text(name))
            assert parse_ttml(serialize_ttml(doc)) == doc, name
    assert timer.elapsed < 1.0
    _report(1, timer, f"{len(GOLDEN_MPDS)} manifests + {len(GOLDEN_TTMLS)} cue "
                      "documents parse clean and round-trip")


def test_criterion_2_golden_values_exact():
    with _Timer() as timer:
        subtitle = parse_ttml(fixture_text("subtitle_360.ttml"))
        s1 = subtitle.cue("s1")
        assert s1.direction == Direction(-30.0, 20.0)
        assert (s1.begin, s1.end) == (MediaTime(1000), MediaTime(4000))

        signer = parse_ttml(fixture_text("signer_metadata.ttml"))
        p1 = signer.cue("p1")
        assert direction_to_longitude_latitude(p1.direction) == (300.0, 10.0)
        assert (p1.begin, p1.end) == (MediaTime(4920), MediaTime(44240))

        ad = parse_mpd(fixture_text("audio_description.mpd"))
        variant = ad.adaptation_set("eng2").representations[0].imac_ad
        assert (variant.gain, variant.mode) == ("medium", "dynamic")
    _report(2, timer, "cue s1 {-30, 20} on [1.000, 4.000); cue p1 300/10 on "
                      "[4.920, 44.240); set eng2 medium/dynamic")


def test_criterion_3_strength_rules():
    with _Timer() as timer:
        for name in ("ambisonic_order0.mpd", "ambisonic_order1_headlock.mpd",
                     "ambisonic_order1_backcompat.mpd"):
            mp = parse_mpd(fixture_text(name))
            for aset in mp.adaptation_sets:
                assert all(not f.error for f in validate_map(aset)), name

        # flipping "1 2 3" to a SupplementalProperty is an error
        flipped = parse_mpd(fixture_text("ambisonic_order0.mpd").replace(
            '<EssentialProperty schemeIdUri="urn:mpeg:dash:ambi-map:2018" value="1 2 3"/>',
            '<SupplementalProperty schemeIdUri="urn:mpeg:dash:ambi-map:2018" value="1 2 3"/>'))
        findings = validate_map(flipped.adaptation_set("2"))
        assert any(f.error for f in findings)

        # signaling the whitelisted "L R" pair as Essential is detected too
        flipped = parse_mpd(fixture_text("ambisonic_order1_backcompat.mpd").replace(
            '<SupplementalProperty schemeIdUri="urn:mpeg:dash:ambi-map:2018" value="L R"/>',
            '<EssentialProperty schemeIdUri="urn:mpeg:dash:ambi-map:2018" value="L R"/>'))
        assert validate_map(flipped.adaptation_set("1"))

        # brute force over every map of length <= 4 from {ACN 0..3, L, R, M}
        whitelist = ({"0": 1}, {"M": 1}, {"L": 1, "R": 1})
        valid_maps = 0
        for length in range(1, 5):
            for combo in itertools.product("0123LRM", repeat=length):
                try:
                    entries = parse_channel_map(" ".join(combo))
                except ChannelMapError:
                    continue
                counts: dict[str, int] = {}
                for token in combo:
                    counts[token] = counts.get(token, 0) + 1
                expected = (StrengthRule.SUPPLEMENTAL_ALLOWED if counts in whitelist
                            else StrengthRule.ESSENTIAL_REQUIRED)
                assert required_strength(entries) is expected, combo
                valid_maps += 1
    assert timer.elapsed < 1.0
    _report(3, timer, f"three signaling layouts clean, both flips detected, "
                      f"{valid_maps} maps brute-forced")


def test_criterion_4_preselection_resolution():
    with _Timer() as timer:
        order0 = parse_mpd(fixture_text("ambisonic_order0.mpd"))
        layout = resolve_preselection(order0, order0.preselections[0])
        assert layout.acn_indices == (0, 1, 2, 3)
        assert layout.head_lock is HeadLock.NONE

        backcompat = parse_mpd(fixture_text("ambisonic_order1_backcompat.mpd"))
        english, french = (resolve_preselection(backcompat, p)
                           for p in backcompat.preselections)
        assert english.acn_indices == (0, 1, 2, 3)
        assert english.head_lock is HeadLock.STEREO_PAIR
        assert english.lang == "en"
        assert english.source_sets == ("1", "3")
        assert french.acn_indices == (0, 1, 2, 3)
        assert french.head_lock is HeadLock.STEREO_PAIR
        assert french.lang == "fr"
        assert french.source_sets == ("2", "3")
    _report(4, timer, "components '1 2' -> ACN {0,1,2,3}; '1 3'/'2 3' -> "
                      "{0,1,2,3} + stereo pair, en/fr")


def test_criterion_5_geometry_property_suite():
    rng = random.Random(0x360)
    with _Timer() as timer:
        for _ in range(10_000):
            d = Direction(rng.uniform(-180, 180), rng.uniform(-90, 90))
            assert abs(direction_to_unit_vector(d).norm() - 1.0) <= 1e-9

        for _ in range(10_000):
            u, v = rng.random(), rng.uniform(1e-6, 1 - 1e-6)
            d = equirect_uv_to_direction(u, v)
            # independent analytic inverse
            u_back = (d.azimuth / 360.0 + 0.5) % 1.0
            v_back = 0.5 - d.elevation / 180.0
            assert min(abs(u_back - u), abs(abs(u_back - u) - 1.0)) <= 1e-9
            assert abs(v_back - v) <= 1e-9

        mismatches = 0
        for yaw in range(-180, 180):
            for target in range(-180, 180):
                raw = float(target - yaw)
                best = min((raw, raw + 360.0, raw - 360.0), key=lambda c: (abs(c), -c))
                if best == -180.0:
                    best = 180.0
                if wrap_degrees(raw) != best:
                    mismatches += 1
        assert mismatches == 0
    assert timer.elapsed < 5.0
    _report(5, timer, "10k unit norms, 10k equirect round trips, 129600-pair "
                      "wrap grid all within 1e-9")


def test_criterion_6_longitude_conversion():
    rng = random.Random(0x361)
    with _Timer() as timer:
        d = longitude_latitude_to_direction(300, 10)
        assert abs(d.azimuth - 60.0) <= 1e-12
        assert d.elevation == 10.0
        for _ in range(10_000):
            longitude = rng.uniform(0, 360)
            d = longitude_latitude_to_direction(longitude, 0.0)
            back, _lat = direction_to_longitude_latitude(d)
            delta = (back - longitude) % 360.0
            assert min(delta, 360.0 - delta) <= 1e-9
    _report(6, timer, "(300, 10) -> azimuth 60 exactly; 10k longitudes "
                      "round-trip mod 360")


def test_criterion_7_simulator_oracle_equivalence():
    with _Timer() as timer:
        mp = parse_mpd(fixture_text("combined_360.mpd"))
        subtitle_doc = parse_ttml(fixture_text("subtitle_360.ttml"))
        signer_doc = parse_ttml(fixture_text("signer_metadata.ttml"))
        docs = {"subs_en": subtitle_doc, "signerMetadata_ger": signer_doc}
        prefs = UserPreferences(
            subtitle=SubtitlePrefs("en", indicator_style=IndicatorStyle.ARROW),
            sign_language=SlPrefs("gsg", hide_when_inactive=True),
        )
        hfov = 90.0
        samples = tuple(
            TraceSample(MediaTime(i * 500), -180.0 + i * (360.0 / 99.0), 0.0)
            for i in range(100))
        trace = ViewportTrace(hfov, 60.0, samples)
        directives = simulate(mp, docs, prefs, trace)
        assert len(directives) == 100

        for sample, directive in zip(samples, directives):
            ms = sample.t.millis
            # interval oracle built straight from the cue table
            expected = [c for c in subtitle_doc.cues
                        if c.begin.millis <= ms < c.end.millis]
            if not expected:
                assert directive.subtitle is None
            else:
                cue = expected[-1]
                assert directive.subtitle.text == "".join(s.text for s in cue.spans)
                offset = cue.direction.azimuth - sample.yaw
                offset = offset % 360.0
                if offset > 180.0:
                    offset -= 360.0
                inside = abs(offset) <= hfov / 2.0
                kind = directive.subtitle.indicator.kind
                assert (kind is IndicatorKind.NONE_VISIBLE) == inside
                assert math.isclose(directive.subtitle.indicator.relative_azimuth,
                                    offset, abs_tol=1e-9)
            assert directive.signer.visible == (4920 <= ms < 44240)

        assert write_directives(simulate(mp, docs, prefs, trace), "json") \
            == write_directives(directives, "json")
    assert timer.elapsed < 2.0
    _report(7, timer, "100-sample sweep matches the interval and wrap oracles; "
                      "output byte-identical across runs")


def test_criterion_8_cli_contract(capsys, tmp_path):
    with _Timer() as timer:
        assert cli_main(["validate", str(fixture_path("sign_language.mpd")),
                         f"signerMetadata_ger={fixture_path('signer_metadata.ttml')}"
                         ]) == 0
        assert cli_main(["validate",
                         str(fixture_path("broken/r1_broken_link.mpd"))]) == 1
        assert cli_main(["validate", str(tmp_path / "missing.mpd")]) == 2
        assert cli_main(["ambi", "parse", "Q"]) == 2
        assert cli_main(["annotate", str(fixture_path("subtitle_360.ttml")),
                         "--cue", "s1", "--azimuth", "200",
                         "-o", str(tmp_path / "out.ttml")]) == 2

        checked = 0
        for name, expected_rule in BROKEN_EXPECTATIONS.items():
            report = validate(parse_mpd(fixture_text(name)))
            assert expected_rule in {f.rule_id for f in report.findings}, name
            checked += 1
        # R8 arrives through the sidecar path
        mp = parse_mpd(fixture_text("sign_language.mpd"))
        try:
            parse_ttml(fixture_text("broken/r8_range.ttml"))
            raise AssertionError("out-of-range fixture must not parse")
        except Exception as exc:  # noqa: BLE001 - the exception is the input
            report = validate(mp, {"signerMetadata_ger": exc})
        assert "R8" in {f.rule_id for f in report.findings
                        if f.severity is Severity.ERROR}
        checked += 1
        assert checked >= 10
        capsys.readouterr()
    _report(8, timer, f"exit codes 0/1/2 exercised; {checked} broken fixtures "
                      "reported their expected rules with zero false negatives")
