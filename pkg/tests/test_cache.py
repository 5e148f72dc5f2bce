from __future__ import annotations

import hashlib
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import compile_corpus, corpus_source
from vspec.cache import (
    CacheManifest,
    Failed,
    ManifestFormatError,
    MissingNetworkBinding,
    MissingParameter,
    NetworkEntry,
    UnknownBinding,
    Unknown,
    Verified,
    check_integrity,
    digest,
    load_manifest,
    now_timestamp,
    record_verification,
)

names = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,8}", fullmatch=True)
text = st.text(alphabet=st.characters(blacklist_characters="\t\n\r;", blacklist_categories=("Cs",)), max_size=12)
hashes = st.binary(max_size=16).map(digest)
statuses = st.one_of(st.just(Failed()), st.just(Unknown()), st.builds(Verified, text, text))
fractions = st.fractions(max_denominator=1000)


@st.composite
def manifests(draw):
    return CacheManifest(
        draw(hashes),
        draw(text),
        draw(st.dictionaries(names, st.builds(NetworkEntry, text, hashes), max_size=3)),
        draw(st.dictionaries(names, fractions, max_size=4)),
        draw(st.dictionaries(names, statuses, max_size=4)),
    )


@given(manifests())
def test_manifest_text_round_trip(m):
    back = CacheManifest.from_text(m.to_text())
    assert back.to_text() == m.to_text()
    assert back.networks == dict(sorted(m.networks.items()))
    assert back.parameters == m.parameters
    assert back.properties == m.properties


@given(manifests())
def test_manifest_entries_are_sorted_bytewise(m):
    keys = [line.split("\t")[0].encode() for line in m.to_text().split("\n") if line]
    assert keys == sorted(keys)


def test_digest_matches_sha256():
    assert digest(b"") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    assert digest(b"abc") == hashlib.sha256(b"abc").hexdigest()


@pytest.mark.parametrize(
    "bad",
    ["spec.hash\tx\n", "version\t1\n", "version\t1\nspec.hash\tx\nmystery\t1\n", "version\t1\nspec.hash\tx\nno tab here\n",
     "version\t1\nspec.hash\tx\nnetwork.n.path\tp\n", "version\t1\nversion\t1\nspec.hash\tx\n",
     "version\t1\nspec.hash\tx\nproperty.p\tmaybe\n"],
)
def test_malformed_manifests_are_rejected(bad):
    with pytest.raises(ManifestFormatError):
        CacheManifest.from_text(bad)


def test_entry_with_tab_cannot_be_written():
    with pytest.raises(ManifestFormatError):
        CacheManifest("h", "a\tb").to_text()


def test_timestamp_honours_source_date_epoch(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    assert now_timestamp() == "1970-01-01T00:00:00Z"


# -- recording and integrity -------------------------------------------------


@pytest.fixture
def car_cache(tmp_path):
    net = tmp_path / "controller.net"
    net.write_bytes(b"affine 1 0 ; 0\n")
    source = tmp_path / "car.vcl"
    source.write_text(corpus_source("car"), encoding="utf-8")
    core = compile_corpus("car").core
    m = record_verification(core, source.read_bytes(), {"controller": str(net)}, {}, {"safe": Verified("mock", "t")}, tmp_path / "cache")
    return tmp_path, m


def test_recorded_manifest_loads_back(car_cache):
    root, m = car_cache
    assert load_manifest(root / "cache").to_text() == m.to_text()
    assert m.properties == {"safe": Verified("mock", "t")}


def test_untouched_files_pass(car_cache):
    root, m = car_cache
    rep = check_integrity(m, (root / "car.vcl").read_bytes())
    assert rep.ok
    assert rep.problems == []


def test_spec_and_network_changes_are_reported(car_cache):
    root, m = car_cache
    (root / "controller.net").write_bytes(b"affine 2 0 ; 0\n")
    rep = check_integrity(m, (root / "car.vcl").read_bytes() + b" ")
    assert [str(f) for f in rep.problems] == ["SpecChanged", "NetworkChanged(controller)"]


def test_missing_network_is_reported(car_cache):
    root, m = car_cache
    (root / "controller.net").unlink()
    rep = check_integrity(m, (root / "car.vcl").read_bytes())
    assert [str(f) for f in rep.problems] == ["NetworkMissing(controller)"]


def test_changed_parameter_and_unverified_property(car_cache):
    root, m = car_cache
    m.parameters["k"] = Fraction(1)
    m.properties["other"] = Unknown()
    rep = check_integrity(m, (root / "car.vcl").read_bytes(), params={"k": Fraction(2)})
    assert [str(f) for f in rep.problems] == ["ParameterChanged(k)", "PropertyNotVerified(other)"]


def test_integrity_reads_through_injected_filesystem(car_cache):
    root, m = car_cache
    rep = check_integrity(m, (root / "car.vcl").read_bytes(), fs=lambda p: b"something else")
    assert [str(f) for f in rep.problems] == ["NetworkChanged(controller)"]


def test_pk_without_a_parameter_is_refused(tmp_path):
    core = compile_corpus("pk").core
    net = tmp_path / "pk.net"
    net.write_bytes(b"affine 1 0 0 0 0 ; 0\n")
    params = {p: Fraction(1) for p in ("Ka", "Vd", "C_safe", "ttd", "Ka_over", "Ka_under", "Ke_over", "Ke_under")}
    with pytest.raises(MissingParameter) as info:
        record_verification(core, b"", {"pk": str(net)}, params, {}, tmp_path / "cache")
    assert info.value.name == "Ke"


def test_missing_and_unknown_bindings(tmp_path):
    core = compile_corpus("car").core
    with pytest.raises(MissingNetworkBinding):
        record_verification(core, b"", {}, {}, {}, tmp_path)
    net = tmp_path / "n"
    net.write_bytes(b"")
    with pytest.raises(UnknownBinding):
        record_verification(core, b"", {"controller": str(net), "other": str(net)}, {}, {}, tmp_path)
