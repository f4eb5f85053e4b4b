"""Command-line behavior: exit codes, artifacts, determinism."""

import json

import pytest

from cocoa.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_translate_g_a(tmp_path, capsys):
    code, out, _err = run(capsys, "translate", "G a", "--out", str(tmp_path))
    assert code == 0
    assert "k=1" in out
    assert (tmp_path / "chain.json").exists()


def test_translate_example_four(tmp_path, capsys):
    code, out, _err = run(capsys, "translate", "GF a -> (GF b & FG c)",
                          "--out", str(tmp_path), "--json")
    assert code == 0
    assert json.loads(out)["k"] == 4


def test_translate_parse_error(tmp_path, capsys):
    code, _out, err = run(capsys, "translate", "a U", "--out", str(tmp_path))
    assert code == 2
    assert "error" in err


def test_translate_resource_cap(tmp_path, capsys):
    code, _out, err = run(capsys, "translate", "GF a -> GF b",
                          "--out", str(tmp_path), "--max-states", "2")
    assert code == 3
    assert "resource cap" in err


def test_translate_hoa_and_dot(tmp_path, capsys):
    code, _out, _err = run(capsys, "translate", "FG a", "--format", "hoa",
                           "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "level-1.hoa").exists()
    assert (tmp_path / "level-2.hoa").exists()
    code, _out, _err = run(capsys, "translate", "FG a", "--format", "dot",
                           "--out", str(tmp_path))
    assert code == 0
    for name in ("awa.dot", "obligation-neg.dot", "obligation-pos.dot",
                 "sltm.dot", "level-1-dfw.dot"):
        assert (tmp_path / name).exists()


def test_translate_deterministic_artifacts(tmp_path, capsys):
    out1 = tmp_path / "one"
    out2 = tmp_path / "two"
    for out in (out1, out2):
        code, _o, _e = run(capsys, "translate", "GF a -> GF b", "--out", str(out))
        assert code == 0
        code, _o, _e = run(capsys, "translate", "GF a -> GF b", "--format",
                           "hoa", "--out", str(out))
        assert code == 0
    assert (out1 / "chain.json").read_bytes() == (out2 / "chain.json").read_bytes()
    assert (out1 / "level-1.hoa").read_bytes() == (out2 / "level-1.hoa").read_bytes()
    assert (out1 / "level-2.hoa").read_bytes() == (out2 / "level-2.hoa").read_bytes()


def test_color_fg_a(capsys):
    code, out, _err = run(capsys, "color", "FG a", "--word", "{a};{a}")
    assert code == 0
    assert "natural_color=2" in out and "member=true" in out
    code, out, _err = run(capsys, "color", "FG a", "--word", ";{a}{}")
    assert code == 0
    assert "natural_color=1" in out and "member=false" in out
    code, out, _err = run(capsys, "color", "G a", "--word", ";{a}")
    assert code == 0
    assert "natural_color=0" in out and "member=true" in out


def test_color_malformed_word(capsys):
    code, _out, err = run(capsys, "color", "G a", "--word", "{a}")
    assert code == 2 and "error" in err


def test_verify_examples(capsys):
    code, out, _err = run(capsys, "verify", "GF a -> GF b",
                          "--prefix", "2", "--period", "3")
    assert code == 0
    assert "counterexamples=0" in out
    code, _out, _err = run(capsys, "verify", "FG a | GF b",
                           "--prefix", "2", "--period", "3")
    assert code == 0


def test_verify_mutation_caught(capsys):
    code, out, _err = run(capsys, "verify", "FG a", "--mutate", "drop-accepting")
    assert code == 1
    assert "counterexamples=0" not in out


def test_verify_json_report(capsys):
    code, out, _err = run(capsys, "verify", "G a", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True and data["k"] == 1


def test_bench_n1(capsys):
    code, out, _err = run(capsys, "bench", "--n", "1", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["k"] == 1
    assert data["sltm_states"] >= 4
    assert data["checks"] == {"sltm_at_least_4": True, "single_level": True}


def test_bench_bad_n(capsys):
    code, _out, err = run(capsys, "bench", "--n", "0")
    assert code == 2 and "error" in err


def test_bad_bounds(capsys):
    code, _out, err = run(capsys, "verify", "G a", "--prefix", "0")
    assert code == 2
