from __future__ import annotations

from pathlib import Path

import pytest

from access360 import parse_mpd, parse_ttml

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


@pytest.fixture
def subtitle_doc():
    return parse_ttml(fixture_text("subtitle_360.ttml"))


@pytest.fixture
def signer_doc():
    return parse_ttml(fixture_text("signer_metadata.ttml"))


@pytest.fixture
def easy_mpd():
    return parse_mpd(fixture_text("easy_to_read.mpd"))


@pytest.fixture
def ad_mpd():
    return parse_mpd(fixture_text("audio_description.mpd"))


@pytest.fixture
def sl_mpd():
    return parse_mpd(fixture_text("sign_language.mpd"))


@pytest.fixture
def ambi_order0_mpd():
    return parse_mpd(fixture_text("ambisonic_order0.mpd"))


@pytest.fixture
def ambi_backcompat_mpd():
    return parse_mpd(fixture_text("ambisonic_order1_backcompat.mpd"))


@pytest.fixture
def combined_mpd():
    return parse_mpd(fixture_text("combined_360.mpd"))
