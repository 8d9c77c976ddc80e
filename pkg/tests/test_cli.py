"""Command line behavior: exit codes, diagnostic channels, file outputs."""

from __future__ import annotations

import json

from click.testing import CliRunner

from thresh import parse_annotations, parse_instances, parse_template, serialize_annotations
from thresh.cli import main
from thresh.compiler import interface_json, read_bundle
from thresh.converters import from_unified, to_unified

from .conftest import FIXTURES, fixture_text

SALSA = str(FIXTURES / "salsa_like.yml")
MQM = str(FIXTURES / "mqm_like.yml")
DATA = str(FIXTURES / "instances.json")
ALICE = str(FIXTURES / "salsa_annotations_alice.json")
BOB = str(FIXTURES / "salsa_annotations_bob.json")
MQM_ANN = str(FIXTURES / "mqm_annotations.json")


def run(*args: str):
    return CliRunner().invoke(main, list(args))


def test_version():
    result = run("--version")
    assert result.exit_code == 0
    assert "thresh" in result.output


def test_validate_clean_template():
    result = run("validate", "-t", SALSA)
    assert result.exit_code == 0
    assert result.output == ""
    assert result.stderr == ""


def test_validate_data_and_annotations():
    result = run("validate", "-t", SALSA, "-d", DATA, "-a", ALICE, "-a", BOB)
    assert result.exit_code == 0


def test_validate_annotations_require_data():
    result = run("validate", "-t", SALSA, "-a", ALICE)
    assert result.exit_code == 2
    assert "requires --data" in result.stderr


def test_validate_broken_template_exits_1(tmp_path):
    path = tmp_path / "broken.yml"
    path.write_text("name: broken\n", "utf-8")
    result = run("validate", "-t", str(path))
    assert result.exit_code == 1
    assert "E_MISSING_KEY" in result.stderr
    assert result.stdout == ""


def test_validate_json_puts_errors_on_stdout(tmp_path):
    path = tmp_path / "broken.yml"
    path.write_text("name: broken\n", "utf-8")
    result = run("validate", "-t", str(path), "--json")
    assert result.exit_code == 1
    diags = json.loads(result.output)
    assert any(d["code"] == "E_MISSING_KEY" for d in diags)
    assert all({"severity", "code", "path", "message"} <= set(d) for d in diags)


def test_validate_warnings_go_to_stderr(tmp_path):
    path = tmp_path / "warned.yml"
    path.write_text(fixture_text("salsa_like.yml") + "zzz_extra: 1\n", "utf-8")
    result = run("validate", "-t", str(path))
    assert result.exit_code == 0
    assert "W_UNKNOWN_KEY" in result.stderr


def test_validate_json_warnings_on_stdout(tmp_path):
    path = tmp_path / "warned.yml"
    path.write_text(fixture_text("salsa_like.yml") + "zzz_extra: 1\n", "utf-8")
    result = run("validate", "-t", str(path), "--json")
    assert result.exit_code == 0
    diags = json.loads(result.output)
    assert [d["severity"] for d in diags] == ["warning"]


def test_validate_unreadable_file_exits_2():
    result = run("validate", "-t", "/nonexistent/template.yml")
    assert result.exit_code == 2
    assert "cannot read" in result.stderr


def test_validate_wrong_typology_annotations_exit_1():
    result = run("validate", "-t", SALSA, "-d", DATA, "-a", MQM_ANN)
    assert result.exit_code == 1
    assert "E_TYPOLOGY_NAME" in result.stderr


def test_compile_matches_library(salsa, instances):
    result = run("compile", "-t", SALSA, "-d", DATA)
    assert result.exit_code == 0
    assert result.output == interface_json(salsa, instances) + "\n"


def test_compile_to_file(tmp_path, salsa, instances):
    out = tmp_path / "interface.json"
    result = run("compile", "-t", SALSA, "-d", DATA, "-o", str(out))
    assert result.exit_code == 0
    assert result.output == ""
    assert out.read_text("utf-8") == interface_json(salsa, instances) + "\n"


def test_compile_with_annotations():
    result = run("compile", "-t", SALSA, "-d", DATA, "-a", ALICE)
    ir = json.loads(result.output)
    assert [pane["annotator_id"] for pane in ir["panes"]] == ["alice"]


def test_compile_locale_es():
    result = run("compile", "-t", SALSA, "-d", DATA, "--locale", "es")
    ir = json.loads(result.output)
    assert ir["strings"]["ui.submit"] == "Enviar anotaciones"


def test_compile_unknown_locale_exits_1():
    result = run("compile", "-t", SALSA, "-d", DATA, "--locale", "tlh")
    assert result.exit_code == 1
    assert "E_UNKNOWN_LOCALE" in result.stderr


def test_compile_json_failure_mode(tmp_path):
    path = tmp_path / "broken.yml"
    path.write_text("name: broken\n", "utf-8")
    result = run("compile", "-t", str(path), "-d", DATA, "--json")
    assert result.exit_code == 1
    assert json.loads(result.output)


def test_bundle_then_unbundle(tmp_path):
    out = tmp_path / "pack.thresh.json"
    result = run("bundle", "-t", SALSA, "-d", DATA, "-a", ALICE, "-o", str(out))
    assert result.exit_code == 0
    parts = read_bundle(out.read_text("utf-8"))
    assert parts.template == fixture_text("salsa_like.yml")

    dest = tmp_path / "unpacked"
    result = run("unbundle", str(out), "-d", str(dest))
    assert result.exit_code == 0
    assert "unpacked" in result.stderr
    assert (dest / "template.yml").read_text("utf-8") == fixture_text("salsa_like.yml")
    assert (dest / "data.json").read_text("utf-8") == fixture_text("instances.json")
    assert (dest / "annotations.json").read_text("utf-8") == fixture_text(
        "salsa_annotations_alice.json")


def test_bundle_without_annotations(tmp_path):
    out = tmp_path / "pack.thresh.json"
    assert run("bundle", "-t", SALSA, "-d", DATA, "-o", str(out)).exit_code == 0
    dest = tmp_path / "unpacked"
    assert run("unbundle", str(out), "-d", str(dest)).exit_code == 0
    assert not (dest / "annotations.json").exists()


def test_unbundle_tampered_exits_1(tmp_path):
    out = tmp_path / "pack.thresh.json"
    run("bundle", "-t", SALSA, "-d", DATA, "-o", str(out))
    bundle = json.loads(out.read_text("utf-8"))
    bundle["sections"]["template"] += "\n# tampered\n"
    out.write_text(json.dumps(bundle), "utf-8")
    result = run("unbundle", str(out), "-d", str(tmp_path / "dest"))
    assert result.exit_code == 1
    assert "E_MANIFEST_MISMATCH" in result.stderr


def test_unbundle_invalid_template_inside_exits_1(tmp_path):
    # Valid input at pack time but the tool still refuses to bundle garbage.
    result = run("bundle", "-t", "/nonexistent.yml", "-d", DATA, "-o", str(tmp_path / "x"))
    assert result.exit_code == 2


def test_convert_requires_exactly_one_unified(tmp_path):
    result = run("convert", "--from", "unified", "--to", "unified",
                 "-i", ALICE, "-t", SALSA, "-d", DATA)
    assert result.exit_code == 2
    assert "offset-label" in result.stderr
    result = run("convert", "--from", "offset-label", "--to", "offset-label",
                 "-i", ALICE, "-t", SALSA, "-d", DATA)
    assert result.exit_code == 2


def test_convert_round_trip(tmp_path, mqm):
    mqm_instances = parse_instances(fixture_text("instances.json"), mqm.config)
    annotations = parse_annotations(fixture_text("mqm_annotations.json"), mqm, mqm_instances)
    offsets_text = from_unified("offset-label", annotations, mqm, mqm_instances)
    offsets = tmp_path / "offsets.json"
    offsets.write_text(offsets_text, "utf-8")

    result = run("convert", "--from", "offset-label", "--to", "unified",
                 "-i", str(offsets), "-t", MQM, "-d", DATA)
    assert result.exit_code == 0
    expected = serialize_annotations(to_unified("offset-label", offsets_text, mqm, mqm_instances))
    assert result.output == expected + "\n"

    unified = tmp_path / "unified.json"
    unified.write_text(result.output, "utf-8")
    back = run("convert", "--from", "unified", "--to", "offset-label",
               "-i", str(unified), "-t", MQM, "-d", DATA)
    assert back.exit_code == 0
    assert back.output == offsets_text + "\n"


def test_convert_unknown_format_exits_1(tmp_path):
    result = run("convert", "--from", "xliff", "--to", "unified",
                 "-i", ALICE, "-t", SALSA, "-d", DATA)
    assert result.exit_code == 1
    assert "E_REGISTRY" in result.stderr


def test_convert_bad_input_exits_1(tmp_path):
    offsets = tmp_path / "offsets.json"
    offsets.write_text(json.dumps([{"instance_id": "s1", "side": "target",
                                    "start": 0, "end": 3, "label": "no_such"}]), "utf-8")
    result = run("convert", "--from", "offset-label", "--to", "unified",
                 "-i", str(offsets), "-t", MQM, "-d", DATA)
    assert result.exit_code == 1
    assert "error" in result.stderr


def test_merge_two_annotators():
    result = run("merge", ALICE, BOB, "-t", SALSA, "-d", DATA)
    assert result.exit_code == 0
    merged = json.loads(result.output)
    assert set(merged["annotators"]) == {"alice", "bob"}


def test_merge_conflict_writes_output_but_exits_1(tmp_path, alice_json):
    revised = json.loads(alice_json)
    revised["instances"]["s1"] = []
    other = tmp_path / "alice2.json"
    other.write_text(json.dumps(revised), "utf-8")
    out = tmp_path / "merged.json"
    result = run("merge", ALICE, str(other), "-t", SALSA, "-d", DATA, "-o", str(out))
    assert result.exit_code == 1
    assert "E_CONFLICT" in result.stderr
    merged = json.loads(out.read_text("utf-8"))
    instances = merged["instances"]
    assert "s1" not in instances
    assert "s2" in instances


def test_merge_json_diagnostics(tmp_path, alice_json):
    revised = json.loads(alice_json)
    revised["instances"]["s1"] = []
    other = tmp_path / "alice2.json"
    other.write_text(json.dumps(revised), "utf-8")
    out = tmp_path / "merged.json"
    result = run("merge", ALICE, str(other), "-t", SALSA, "-d", DATA,
                 "-o", str(out), "--json")
    assert result.exit_code == 1
    diags = json.loads(result.output)
    assert any(d["code"] == "E_CONFLICT" for d in diags)


def test_merge_duplicate_submission_warns():
    result = run("merge", ALICE, ALICE, "-t", SALSA, "-d", DATA)
    assert result.exit_code == 0
    assert "W_DUP_ENTRY" in result.stderr


def test_serve_invalid_config_exits_1(tmp_path):
    config = tmp_path / "server.yml"
    config.write_text("prot: 9000\n", "utf-8")
    result = run("serve", "-c", str(config))
    assert result.exit_code == 1
    assert "E_UNKNOWN_KEY" in result.stderr


def test_serve_missing_config_exits_2():
    result = run("serve", "-c", "/nonexistent/server.yml")
    assert result.exit_code == 2
    assert "cannot read config" in result.stderr
