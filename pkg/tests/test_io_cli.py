import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings

from conftest import cores, gluing_data
from monodromic import io
from monodromic.blocks import NilpBlock
from monodromic.cli import FAILED, OK, USAGE, main
from monodromic.errors import ParseError, SchemaError
from monodromic.generate import GeneratorConfig, case_rng, generate_random, random_datum
from monodromic.gluing import GluingDatum, functor_G, validate_gluing
from monodromic.linalg import Matrix
from monodromic.suites import REPORT_SCHEMA, ConfigError, run_suite

GOLDEN = Path(__file__).parent / "golden"
half = Fraction(-1, 2)


def nilp_datum():
    return GluingDatum({half: NilpBlock(2).piece})


# documents

def test_zero_datum_golden():
    assert io.emit(GluingDatum.zero()) == (GOLDEN / "zero_gluing.json").read_text()


def test_generator_golden():
    assert io.emit(generate_random(GeneratorConfig(seed=0, case_count=1))) == (GOLDEN / "gen_seed0.json").read_text()


def test_nilpotent_block_round_trip():
    g = nilp_datum()
    assert io.parse(io.emit(g)) == g


def test_canonical_bytes():
    a = io.emit(nilp_datum())
    b = io.emit(io.parse(a))
    assert a == b
    # key order in the input does not matter
    shuffled = json.dumps(json.loads(a), sort_keys=False)
    assert io.emit(io.parse(shuffled)) == a


@settings(max_examples=30)
@given(gluing_data(max_dim=5))
def test_round_trip_of_every_kind(g):
    assert io.parse(io.emit(g)) == g
    m = functor_G(g)
    assert io.parse(io.emit(m)) == m
    assert io.parse(io.emit(m.core)) == m.core


@given(cores())
def test_core_round_trip(core):
    assert io.parse(io.emit(core)) == core


def test_list_of_documents():
    xs = [nilp_datum(), GluingDatum.zero()]
    assert io.parse(io.emit(xs)) == xs


def test_psi_only_survives():
    back = io.parse(io.emit(nilp_datum()))
    assert back.psi_only


def _doc(**payload_changes):
    d = io.to_document(nilp_datum())
    d["payload"]["psi"][0].update(payload_changes)
    return json.dumps(d, indent=2)


def test_alpha_out_of_range():
    with pytest.raises(SchemaError) as e:
        io.parse(_doc(alpha="1/2"))
    assert "alpha out of range" in str(e.value)
    assert e.value.field == "payload.psi[0].alpha"


def test_float_is_a_parse_error_with_position():
    text = _doc(alpha=-0.5)
    with pytest.raises(ParseError) as e:
        io.parse(text)
    assert e.value.line > 1 and e.value.column > 1


def test_broken_json():
    with pytest.raises(ParseError) as e:
        io.parse('{"kind": "gluing",\n  "version": }')
    assert e.value.line == 2


@pytest.mark.parametrize("text, field", [
    ('{"kind": "sheaf", "version": "1.0.0", "payload": {}}', "kind"),
    ('{"kind": "gluing", "version": "2.0.0", "payload": {}}', "version"),
    ('{"kind": "gluing", "version": "1.0.0"}', "payload"),
])
def test_envelope_errors(text, field):
    with pytest.raises(SchemaError) as e:
        io.parse(text)
    assert field in e.value.field


def test_bad_rational_and_shape():
    with pytest.raises(SchemaError):
        io.parse(_doc(alpha="one half"))
    d = io.to_document(nilp_datum())
    d["payload"]["psi"][0]["N"]["rows"] = 3
    with pytest.raises(SchemaError):
        io.parse(json.dumps(d))


def test_no_floats_anywhere_in_output():
    text = io.emit(generate_random(GeneratorConfig(seed=3, case_count=5)))
    json.loads(text, parse_float=lambda s: pytest.fail(f"float {s}"))


# generator

def test_generator_is_deterministic():
    cfg = GeneratorConfig(seed=11, case_count=5)
    assert io.emit(generate_random(cfg)) == io.emit(generate_random(cfg))
    assert random_datum(case_rng(11, 3), cfg) == generate_random(cfg)[3]


def test_max_dim_zero_gives_zero_data():
    assert all(g == GluingDatum.zero() for g in generate_random(GeneratorConfig(max_dim=0, case_count=4)))


def test_generated_data_are_valid():
    cfg = GeneratorConfig(seed=5, case_count=300)
    for g in generate_random(cfg):
        assert validate_gluing(g) == []
        assert g.total_dim <= cfg.max_dim
        assert all(a.denominator <= 6 for a in g.psi)


@pytest.mark.parametrize("kw", [{"max_dim": -1}, {"eigen_denominators": ()}, {"seed": -1}, {"seed": 2 ** 64}])
def test_bad_generator_config(kw):
    with pytest.raises(ValueError):
        GeneratorConfig(**kw)


# suites

def corrupted():
    """Valid on the nearby side but v c = 0 while N_0 is a Jordan block."""
    return GluingDatum({0: NilpBlock(2).piece}, NilpBlock(2).mhs.twisted(-1), Matrix.zeros(2, 2), Matrix.identity(2))


def test_suite_reports_counterexample():
    rep = run_suite("roundtrip", cases=[nilp_datum(), corrupted()])
    assert rep["schema"] == REPORT_SCHEMA and rep["failed"] == 1 and not rep["ok"]
    bad = rep["results"][1]
    assert not bad["ok"] and bad["counterexample"] == io.to_document(corrupted())
    assert rep["results"][0]["counterexample"] is None


def test_empty_suite_passes():
    rep = run_suite("all", cases=[])
    assert rep["ok"] and rep["cases"] == 0


def test_unknown_suite():
    with pytest.raises(ConfigError):
        run_suite("everything", cases=[])


@pytest.mark.parametrize("name", ["roundtrip", "vfilt", "weights", "arashi", "blocks", "fourier", "dual"])
def test_each_suite_on_a_few_cases(name):
    rep = run_suite(name, GeneratorConfig(seed=2, case_count=4, max_dim=4))
    assert rep["ok"], rep["results"]
    assert isinstance(rep["wall_time_ms"], int)


def test_parallel_run_matches_serial():
    cfg = GeneratorConfig(seed=4, case_count=6, max_dim=4)
    a, b = run_suite("dual", cfg), run_suite("dual", cfg, jobs=2)
    assert [r["index"] for r in b["results"]] == list(range(6))
    assert [r["ok"] for r in a["results"]] == [r["ok"] for r in b["results"]]


# command line

@pytest.fixture
def doc(tmp_path):
    def write(obj, name="in.json"):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else io.emit(obj))
        return str(p)
    return write


def test_cli_validate(doc, capsys):
    assert main(["validate", doc(nilp_datum())]) == OK
    assert capsys.readouterr().out == "gluing: valid\n"
    assert main(["validate", doc(corrupted())]) == FAILED


def test_cli_validate_json(doc, capsys):
    main(["validate", "--json", doc(corrupted())])
    rep = json.loads(capsys.readouterr().out)
    assert "v·c ≠ −N_0" in json.dumps(rep, ensure_ascii=False)


def test_cli_gen_matches_golden(capsys):
    assert main(["gen", "--seed", "0", "--cases", "1"]) == OK
    assert capsys.readouterr().out == (GOLDEN / "gen_seed0.json").read_text()


def test_cli_pipeline(doc, capsys):
    assert main(["fourier", doc(nilp_datum())]) == OK
    transformed = capsys.readouterr().out
    assert main(["validate", doc(transformed, "f.json")]) == OK
    for verb in ("cycles", "dual", "roundtrip"):
        assert main([verb, "--json", doc(nilp_datum())]) == OK
    assert main(["expand", "--window", "1", doc(nilp_datum())]) == OK


def test_cli_blocks(doc, capsys):
    assert main(["blocks", "--r", "2", "--m", "2"]) == OK
    L, S = io.parse(capsys.readouterr().out)
    assert L.N(0) == NilpBlock(2).N and len(S.psi) == 2
    assert main(["blocks", "--r", "2", "--m", "2", "--json", doc(nilp_datum())]) == OK
    assert json.loads(capsys.readouterr().out)["matches_direct"]
    assert main(["blocks", "--r", "1", "--m", "2", doc(nilp_datum())]) == FAILED
    assert main(["blocks", "--r", "0"]) == USAGE


def test_cli_suite(doc, capsys):
    assert main(["suite", "--name", "roundtrip", "--cases", "3", "--json"]) == OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["cases"] == 3 and rep["ok"]
    assert main(["suite", "--name", "roundtrip", "--input", doc([corrupted()])]) == FAILED
    assert main(["suite", "--name", "nope"]) == USAGE


def test_cli_usage_errors(doc, capsys):
    assert main(["frobnicate"]) == USAGE
    assert main(["validate", doc('{"kind": "gluing", "version": "1.0.0", "payload": {"psi": 0.5}}')]) == USAGE
    assert main(["validate", "/no/such/file"]) == USAGE
    assert main(["roundtrip", doc(functor_G(nilp_datum()).core)]) == USAGE
    assert main(["gen", "--max-dim", "-1"]) == USAGE
    capsys.readouterr()
