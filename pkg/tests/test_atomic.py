import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ionjump import (
    DEFAULT_DATABASE,
    derive_detuning,
    lamb_dicke_scale,
    load_database,
    serialize_database,
)
from ionjump.atomic import ALLOWED_SOURCE_TAGS
from ionjump.errors import (
    MissingFieldError,
    MissingIon,
    NonPositiveInput,
    ParseError,
    UnknownTransition,
    ValidationError,
)

MINIMAL_ION = {
    "name": "X+",
    "levels": [{"index": 0, "label": "g"}, {"index": 1, "label": "e"}],
    "transitions": [
        {"from": 1, "to": 0, "omega_rad_per_s": 1e15, "multipole": "E2",
         "gamma_partial": {"0": 2.0}, "gamma_total_per_s": 2.0}
    ],
    "gamma_out_per_s": 0.0,
}


def _write_db(tmp_path, ions, **extra):
    payload = {"schema_version": 1, "ions": ions, **extra}
    path = tmp_path / "ions.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_default_database_contains_the_four_ions(db):
    assert db.names() == ["Ca+", "Hg+", "Ba+", "Yb+"]
    assert db.get("Ca+").omega(1, 0) == 2.61e15


def test_empty_ion_list_is_valid(tmp_path):
    path = _write_db(tmp_path, [])
    assert load_database(path).ions == {}


def test_negative_partial_rate_names_the_transition(tmp_path):
    bad = json.loads(json.dumps(MINIMAL_ION))
    bad["transitions"][0]["gamma_partial"]["0"] = -1.0
    bad["transitions"][0].pop("gamma_total_per_s")
    path = _write_db(tmp_path, [bad])
    with pytest.raises(ValidationError, match="1->0"):
        load_database(path)


def test_malformed_file_is_a_parse_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_database(path)
    with pytest.raises(ParseError):
        load_database(tmp_path / "missing.json")


def test_missing_required_field(tmp_path):
    bad = {k: v for k, v in MINIMAL_ION.items() if k != "gamma_out_per_s"}
    path = _write_db(tmp_path, [bad])
    with pytest.raises(MissingFieldError, match="gamma_out_per_s"):
        load_database(path)


def test_unknown_key_strict_vs_lenient(tmp_path):
    odd = json.loads(json.dumps(MINIMAL_ION))
    odd["surprise"] = 1
    path = _write_db(tmp_path, [odd])
    with pytest.raises(ValidationError, match="surprise"):
        load_database(path, strict=True)
    with pytest.warns(UserWarning, match="surprise"):
        load_database(path, strict=False)


def test_total_width_mismatch_is_rejected(tmp_path):
    bad = json.loads(json.dumps(MINIMAL_ION))
    bad["transitions"][0]["gamma_total_per_s"] = 3.0
    path = _write_db(tmp_path, [bad])
    with pytest.raises(ValidationError, match="stored total"):
        load_database(path)


def test_duplicate_labels_rejected(tmp_path):
    bad = json.loads(json.dumps(MINIMAL_ION))
    bad["levels"][1]["label"] = "g"
    path = _write_db(tmp_path, [bad])
    with pytest.raises(ValidationError, match="unique"):
        load_database(path)


def test_round_trip_serialization(db, tmp_path):
    path = tmp_path / "copy.json"
    path.write_text(serialize_database(db), encoding="utf-8")
    again = load_database(path)
    assert again == db


def test_partial_rate_closure(db):
    for ion in db.ions.values():
        for tr in ion.transitions:
            if tr.gamma_total is None or not tr.gamma_partial:
                continue
            total = sum(tr.gamma_partial.values())
            assert math.isclose(total, tr.gamma_total, rel_tol=1e-12)


def test_provenance_completeness():
    """Every numeric datum in the bundled file carries a source tag."""
    raw = json.loads(DEFAULT_DATABASE.read_text(encoding="utf-8"))
    for ion in raw["ions"]:
        tags = ion.get("provenance", {})
        assert tags.get("gamma_out") in ALLOWED_SOURCE_TAGS, ion["name"]
        if "mass_kg" in ion:
            assert tags.get("mass") in ALLOWED_SOURCE_TAGS, ion["name"]
        for tr in ion["transitions"]:
            where = f"{ion['name']} {tr['from']}->{tr['to']}"
            tr_tags = tr.get("provenance", {})
            assert tr_tags.get("omega") in ALLOWED_SOURCE_TAGS, where
            for dest in tr.get("gamma_partial", {}):
                tag = tr_tags.get(f"gamma.{dest}", tr_tags.get("gamma"))
                assert tag in ALLOWED_SOURCE_TAGS, f"{where} partial {dest}"


def test_detuning_examples(db):
    ca = db.get("Ca+")
    assert derive_detuning(ca, 2.61e15, ca.transition(2, 0)) == pytest.approx(-2.15e15)
    assert derive_detuning(ca, 4.76e15, ca.transition(2, 0)) == 0.0
    assert derive_detuning(ca, 2.61e15, ca.transition(2, 1)) == pytest.approx(0.46e15)


def test_detuning_unknown_transition(db):
    ca, ba = db.get("Ca+"), db.get("Ba+")
    with pytest.raises(UnknownTransition):
        derive_detuning(ca, 2.61e15, ba.transition(2, 0))


def test_missing_ion(db):
    with pytest.raises(MissingIon):
        db.get("Sr+")


def test_lamb_dicke_scale_examples():
    assert lamb_dicke_scale(1.0, 2.61e15, 2.61e15) == 1.0
    assert lamb_dicke_scale(0.01, 2.61e15, 4.76e15) == pytest.approx(0.0182375478927)
    with pytest.raises(NonPositiveInput):
        lamb_dicke_scale(0.0, 1.0, 1.0)


@given(eta=st.floats(1e-6, 10.0), omega_ref=st.floats(1e12, 1e16),
       omega_new=st.floats(1e12, 1e16))
def test_lamb_dicke_scale_is_linear_in_omega_new(eta, omega_ref, omega_new):
    one = lamb_dicke_scale(eta, omega_ref, omega_new)
    two = lamb_dicke_scale(eta, omega_ref, 2.0 * omega_new)
    assert two == pytest.approx(2.0 * one, rel=1e-12)
