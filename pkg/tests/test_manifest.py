from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from access360.errors import InvariantViolation, MalformedXml
from access360.manifest import (
    DASH_NS,
    IMAC_NS,
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
from conftest import fixture_text

MINIMAL_MPD = """<?xml version="1.0"?>
<MPD xmlns="urn:mpeg:dash:schema:mpd:2011">
  <Period>
    <AdaptationSet>
      <Representation id="r1"/>
    </AdaptationSet>
  </Period>
</MPD>
"""


class TestParse:
    def test_easy_to_read_descriptors(self, easy_mpd):
        aset = easy_mpd.adaptation_sets[0]
        assert [(d.scheme_id_uri, d.value) for d in aset.roles] == [
            ("urn:mpeg:dash:role:2011", "alternate")]
        assert [(d.scheme_id_uri, d.value) for d in aset.accessibility] == [
            ("urn:imac:access-identifier:2019", "easy-to-read")]
        assert all(d.strength is DescriptorStrength.PLAIN
                   for d in aset.roles + aset.accessibility)

    def test_ad_variants(self, ad_mpd):
        eng2 = ad_mpd.adaptation_set("eng2")
        assert eng2.representations[0].imac_ad == AdVariant("medium", "dynamic")
        eng1 = ad_mpd.adaptation_set("eng1")
        assert eng1.representations[0].imac_ad == AdVariant("low", "static")

    def test_placeholder_namespace_normalized_with_warning(self, ad_mpd):
        assert ad_mpd.declared_namespaces["imac"] == IMAC_NS
        assert any("normalized" in w for w in ad_mpd.warnings)

    def test_minimal_document(self):
        mp = parse_mpd(MINIMAL_MPD)
        aset = mp.adaptation_sets[0]
        assert aset.roles == () and aset.accessibility == ()
        assert aset.supplemental_properties == () and aset.essential_properties == ()
        assert len(aset.representations) == 1

    def test_ad_attribute_form(self):
        text = MINIMAL_MPD.replace(
            '<Representation id="r1"/>',
            '<Representation id="r1" imac:gain="high" imac:mode="classic"/>',
        ).replace(
            'xmlns="urn:mpeg:dash:schema:mpd:2011"',
            'xmlns="urn:mpeg:dash:schema:mpd:2011" xmlns:imac="http://www.imac-project.eu"',
        )
        mp = parse_mpd(text)
        assert mp.adaptation_sets[0].representations[0].imac_ad == AdVariant("high", "classic")

    def test_prefix_independence(self):
        with_imac = fixture_text("audio_description.mpd")
        other_prefix = (with_imac
                        .replace("xmlns:imac=", "xmlns:ns7=")
                        .replace("imac:AudioDescription", "ns7:AudioDescription"))
        assert parse_mpd(with_imac) == parse_mpd(other_prefix)

    def test_narrative_attribute_preserved(self):
        text = fixture_text("audio_description.mpd").replace(
            'gain="low" mode="static"', 'gain="low" mode="static" narrative="dramatic"')
        rep = parse_mpd(text).adaptation_set("eng1").representations[0]
        assert rep.imac_ad.narrative == "dramatic"

    def test_dependency_ids(self):
        text = MINIMAL_MPD.replace('<Representation id="r1"/>',
                                   '<Representation id="r1" dependencyId="a b"/>')
        rep = parse_mpd(text).adaptation_sets[0].representations[0]
        assert rep.dependency_ids == ("a", "b")

    def test_unmodeled_elements_counted(self):
        text = MINIMAL_MPD.replace("<Period>", "<Period><EventStream/>")
        mp = parse_mpd(text)
        assert any("ignored 1 unmodeled" in w for w in mp.warnings)

    def test_preselection_attributes(self, ambi_backcompat_mpd):
        first, second = ambi_backcompat_mpd.preselections
        assert first == Preselection(("1", "3"), "en")
        assert second == Preselection(("2", "3"), "fr")


class TestParseErrors:
    def test_malformed(self):
        with pytest.raises(MalformedXml):
            parse_mpd("<MPD><unclosed></MPD>")

    def test_empty_adaptation_set(self):
        text = """<MPD><Period><AdaptationSet id="a"/></Period></MPD>"""
        with pytest.raises(SchemaViolation) as err:
            parse_mpd(text)
        assert "AdaptationSet[@id='a']" in str(err.value)

    def test_duplicate_ids(self):
        text = """<MPD><Period>
            <AdaptationSet id="a"><Representation id="r1"/></AdaptationSet>
            <AdaptationSet id="a"><Representation id="r2"/></AdaptationSet>
        </Period></MPD>"""
        with pytest.raises(SchemaViolation):
            parse_mpd(text)

    def test_gain_without_mode(self):
        text = MINIMAL_MPD.replace(
            '<Representation id="r1"/>',
            '<Representation id="r1" xmlns:i="http://www.imac-project.eu" i:gain="low"/>')
        with pytest.raises(SchemaViolation):
            parse_mpd(text)

    def test_root_must_be_mpd(self):
        with pytest.raises(SchemaViolation):
            parse_mpd("<Manifest/>")

    @given(st.text(max_size=200))
    @settings(max_examples=200)
    def test_never_panics_on_arbitrary_text(self, text):
        try:
            parse_mpd(text)
        except (MalformedXml, SchemaViolation):
            pass


class TestInvariants:
    def test_adaptation_set_needs_representations(self):
        with pytest.raises(InvariantViolation):
            AdaptationSet(id="x")

    def test_strength_consistency(self):
        plain = Descriptor("urn:x", "y")
        with pytest.raises(InvariantViolation):
            AdaptationSet(supplemental_properties=(plain,),
                          representations=(Representation("r"),))

    def test_duplicate_set_ids_rejected(self):
        aset = AdaptationSet(id="a", representations=(Representation("r"),))
        with pytest.raises(InvariantViolation):
            MediaPresentation((aset, aset))

    def test_preselection_component_rules(self):
        with pytest.raises(InvariantViolation):
            Preselection(())
        with pytest.raises(InvariantViolation):
            Preselection(("1", "1"))


_token = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-",
    min_size=1, max_size=10)
_value = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyz0123456789:/._ -", min_size=0, max_size=16)


def _descriptor(strength: DescriptorStrength):
    return st.builds(Descriptor, scheme_id_uri=st.one_of(
        st.sampled_from(["urn:mpeg:dash:role:2011",
                         "urn:tva:metadata:cs:AudioPurposeCS:2007",
                         "urn:imac:access-identifier:2019",
                         "urn:mpeg:dash:ambi-map:2018"]),
        _token.map("urn:test:{}".format)),
        value=_value, strength=st.just(strength))


_variant = st.builds(
    AdVariant,
    gain=st.sampled_from(["low", "medium", "high", "loud"]),
    mode=st.sampled_from(["classic", "static", "dynamic"]),
    narrative=st.one_of(st.none(), _token),
)

_representation = st.builds(
    Representation,
    id=_token,
    bandwidth=st.one_of(st.none(), st.integers(0, 10_000_000)),
    codecs=st.one_of(st.none(), st.sampled_from(["mp4a.40.2", "stpp.ttml.etd1", "avc1"])),
    dependency_ids=st.lists(_token, max_size=2).map(tuple),
    audio_channel_count=st.one_of(st.none(), st.integers(1, 8)),
    imac_ad=st.one_of(st.none(), _variant),
    base_url=st.one_of(st.none(), _token),
    descriptors=st.lists(st.one_of(_descriptor(DescriptorStrength.SUPPLEMENTAL),
                                   _descriptor(DescriptorStrength.ESSENTIAL)),
                         max_size=2).map(tuple),
)


@st.composite
def _media_presentations(draw):
    set_ids = draw(st.lists(_token, min_size=0, max_size=4, unique=True))
    sets = []
    for set_id in set_ids:
        sets.append(AdaptationSet(
            id=set_id,
            lang=draw(st.one_of(st.none(), st.sampled_from(["en", "de", "gsg"]))),
            content_type=draw(st.one_of(st.none(), st.sampled_from(["text", "application"]))),
            mime_type=draw(st.one_of(st.none(), st.sampled_from(
                ["audio/mp4", "application/mp4", "application/ttml+xml"]))),
            roles=tuple(draw(st.lists(_descriptor(DescriptorStrength.PLAIN), max_size=2))),
            accessibility=tuple(draw(st.lists(_descriptor(DescriptorStrength.PLAIN),
                                              max_size=2))),
            supplemental_properties=tuple(draw(st.lists(
                _descriptor(DescriptorStrength.SUPPLEMENTAL), max_size=2))),
            essential_properties=tuple(draw(st.lists(
                _descriptor(DescriptorStrength.ESSENTIAL), max_size=2))),
            representations=tuple(draw(st.lists(_representation, min_size=1, max_size=3))),
        ))
    preselections = []
    if set_ids:
        for _ in range(draw(st.integers(0, 2))):
            components = draw(st.lists(st.sampled_from(set_ids), min_size=1,
                                       max_size=len(set_ids), unique=True))
            preselections.append(Preselection(
                tuple(components),
                draw(st.one_of(st.none(), st.sampled_from(["en", "fr"]))),
                draw(st.one_of(st.none(), _token)),
            ))
    return MediaPresentation(tuple(sets), tuple(preselections))


class TestRoundTrip:
    def test_golden_fixtures(self, easy_mpd, ad_mpd, sl_mpd, ambi_order0_mpd,
                             ambi_backcompat_mpd, combined_mpd):
        for mp in (easy_mpd, ad_mpd, sl_mpd, ambi_order0_mpd,
                   ambi_backcompat_mpd, combined_mpd):
            assert parse_mpd(serialize_mpd(mp)) == mp

    def test_empty_presentation(self):
        mp = MediaPresentation()
        text = serialize_mpd(mp)
        assert parse_mpd(text) == mp
        assert "MPD" in text

    def test_emits_child_element_form(self, ad_mpd):
        text = serialize_mpd(ad_mpd)
        assert '<imac:AudioDescription gain="low" mode="static"' in text
        assert f'xmlns:imac="{IMAC_NS}"' in text

    def test_extra_namespace_declarations_survive(self):
        text = MINIMAL_MPD.replace(
            'xmlns="urn:mpeg:dash:schema:mpd:2011"',
            'xmlns="urn:mpeg:dash:schema:mpd:2011" '
            'xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"')
        mp = parse_mpd(text)
        assert mp.declared_namespaces["xsi"] == "http://www.w3.org/2001/XMLSchema-instance"
        assert parse_mpd(serialize_mpd(mp)) == mp

    @given(_media_presentations())
    @settings(max_examples=60, deadline=None)
    def test_random_models(self, mp):
        assert parse_mpd(serialize_mpd(mp)) == mp
