from __future__ import annotations

import json
import math

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from univcheck import criteria as cr
from univcheck import oracle as orc
from univcheck import report as rp
from univcheck.config import RunConfig
from univcheck.pipeline import run

FAST = {"nr": 24, "ntheta": 48, "refine": 1}


def doc_for(**values) -> dict:
    return run(RunConfig.from_mapping({**FAST, **values}), write=False).document


@pytest.fixture(scope="module")
def documents() -> dict[str, dict]:
    return {
        "identity": doc_for(criterion="becker", f="identity", emit="report,diagnostics"),
        "koebe": doc_for(criterion="becker", f="koebe"),
        "qc": doc_for(criterion="qc-becker", f="polynomial:0:1:0.1", k=0.25, emit="report,diagnostics"),
        "qc-koebe": doc_for(criterion="qc-becker", f="koebe", k=0.25),
        "noshiro": doc_for(criterion="noshiro", f="polynomial:0:1:0.5"),
        # rmax = 0.5 puts the zero -0.5 of g on the outer ring.
        "inapplicable": doc_for(criterion="general", f="identity", g_coeffs="1;2", rmax=0.5),
        "error": doc_for(criterion="general", f="identity", alpha=0.5),
    }


def test_documents_validate_against_schema(documents):
    sch = rp.schema()
    jsonschema.Draft202012Validator.check_schema(sch)
    for doc in documents.values():
        jsonschema.validate(json.loads(rp.dumps(doc)), sch)


def test_schema_rejects_unknown_verdict(documents):
    bad = json.loads(rp.dumps(documents["identity"]))
    bad["criterion"]["verdict"] = "probably-fine"
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, rp.schema())


def test_verdicts_are_fixed_enum_strings(documents):
    for doc in documents.values():
        if doc["criterion"] is not None:
            assert doc["criterion"]["verdict"] in (cr.NO_VIOLATION, cr.VIOLATION, cr.INAPPLICABLE)
        for o in doc["oracles"]:
            assert o["verdict"] in (orc.CONSISTENT, orc.NON_UNIVALENT, orc.INCONCLUSIVE)
    assert documents["identity"]["status"]["outcome"] == "pass"
    assert documents["koebe"]["status"]["outcome"] == "violation"
    assert documents["inapplicable"]["status"]["exit_code"] == 2
    assert documents["error"]["criterion"] is None


def test_roundtrip_text_is_stable(documents):
    for doc in documents.values():
        text = rp.dumps(doc)
        assert rp.dumps(rp.loads(text)) == text


def test_roundtrip_values(tmp_path, documents):
    doc = documents["identity"]
    p = tmp_path / "r.report"
    rp.write_report(doc, p)
    back = rp.read_report(p)
    assert back == json.loads(json.dumps(doc, default=_plain), object_hook=_complex_hook)


def _plain(o):
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    raise TypeError(o)


def _complex_hook(d):
    return complex(d["re"], d["im"]) if set(d) == {"re", "im"} else d


def test_float_format_is_seventeen_significant_digits():
    text = rp.dumps({"x": 0.1, "z": 1 + 2j, "n": math.nan, "i": -math.inf, "k": 3})
    assert '"x": 1.0000000000000001e-01' in text
    assert '"z": {"re": 1.0000000000000000e+00, "im": 2.0000000000000000e+00}' in text
    assert '"n": "NaN"' in text and '"i": "-Infinity"' in text and '"k": 3' in text


@settings(max_examples=200, deadline=None)
@given(st.floats(allow_nan=False), st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_scalars_roundtrip_exactly(x, z):
    back = rp.loads(rp.dumps({"x": x, "z": z, "l": [x, z]}))
    assert back["x"] == x and back["z"] == z and back["l"] == [x, z]


def test_key_order_is_fixed(documents):
    doc = documents["qc"]
    assert list(doc) == ["tool", "config", "status", "criterion", "chain", "oracles", "beltrami", "images"]
    assert list(json.loads(rp.dumps(doc))["beltrami"])[:3] == ["annulus", "h", "sup_abs_mu"]


def test_qc_report_contents(documents):
    b = documents["qc"]["beltrami"]
    assert b["sup_abs_mu"] <= 0.27
    assert b["seam_gap"] <= 1e-4
    assert b["criterion_satisfied"] is True
    kb = documents["qc-koebe"]["beltrami"]
    assert kb["criterion_satisfied"] is False
    assert kb["sup_abs_mu"] > 0.25


def test_config_echo_is_verbatim(documents):
    echo = documents["qc"]["config"]
    assert echo["f"] == "polynomial:0:1:0.1"
    assert echo["k"] == "0.25"
    assert echo["alpha"] == "1"
    assert "threads" not in echo and "out_dir" not in echo
