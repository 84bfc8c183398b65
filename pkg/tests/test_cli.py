import json

import pytest

from autalg.automata import format_automaton, parse_automaton, thue_morse
from autalg.cli import RunConfig, main
from autalg.eqsys import parse_system
from autalg.mpoly import parse_mpoly
from autalg.series import parse_series


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


@pytest.fixture
def tm_file(tmp_path):
    path = tmp_path / "tm.aut"
    path.write_text(format_automaton(thue_morse()))
    return str(path)


def test_no_arguments_usage(capsys):
    code, _, err = run(capsys)
    assert code == 2 and "usage" in err


def test_unknown_verb(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 2


def test_missing_file_exit_one(capsys, tmp_path):
    code, _, err = run(capsys, "automaton", "terms", str(tmp_path / "missing.aut"))
    assert code == 1 and err.startswith("error:")


def test_invalid_config_rejected(capsys):
    assert run(capsys, "--p", "4", "series", "random")[0] == 2
    assert run(capsys, "--trunc", "4", "series", "random")[0] == 2
    with pytest.raises(ValueError):
        RunConfig(p=6).validate()


def test_kernel_of_thue_morse(capsys, tm_file):
    code, out, _ = run(capsys, "kernel", "--automaton", tm_file)
    assert code == 0 and out.startswith("kernel size 2")
    code, out, _ = run(capsys, "--format", "structured", "kernel", "--automaton", tm_file)
    assert json.loads(out)["size"] == 2


def test_subfield_f9(capsys):
    code, out, _ = run(capsys, "tyszka", "subfield", "--field", "9")
    assert code == 0 and out.strip() == "{0, 1, 2}"


def test_terms_and_minimize(capsys, tm_file, tmp_path):
    code, out, _ = run(capsys, "automaton", "terms", tm_file, "--count", "8")
    assert out.split() == ["0", "1", "1", "0", "1", "0", "0", "1"]
    code, out, _ = run(capsys, "automaton", "minimize", tm_file)
    assert parse_automaton(out).sequence(64) == thue_morse().sequence(64)


def test_series_random_deterministic(capsys):
    a = run(capsys, "--seed", "3", "--p", "3", "--trunc", "40", "series", "random")[1]
    b = run(capsys, "--seed", "3", "--p", "3", "--trunc", "40", "series", "random")[1]
    c = run(capsys, "--seed", "4", "--p", "3", "--trunc", "40", "series", "random")[1]
    assert a == b != c
    F = parse_series(a.strip())
    assert F.p == 3 and F.trunc == 40


def test_env_defaults(capsys, monkeypatch):
    monkeypatch.setenv("AUTALG_P", "5")
    monkeypatch.setenv("AUTALG_TRUNC", "16")
    out = run(capsys, "series", "random")[1]
    F = parse_series(out.strip())
    assert F.p == 5 and F.trunc == 16


def test_cartier_reassemble_round_trip(capsys, tmp_path):
    out = run(capsys, "--seed", "1", "--trunc", "64", "series", "random")[1]
    src = tmp_path / "f.ser"
    src.write_text(out)
    parts = run(capsys, "series", "cartier", str(src))[1]
    pfile = tmp_path / "parts.ser"
    pfile.write_text(parts)
    back = run(capsys, "series", "reassemble", str(pfile))[1]
    assert parse_series(back.strip()).agrees(parse_series(out.strip()))


def test_hensel_and_norm(capsys, tmp_path):
    out = run(capsys, "--trunc", "32", "series", "hensel", "--poly", "Y1^2 + Y1 + X", "--root", "0")[1]
    F = parse_series(out.strip())
    assert F.dense(9) == [0, 1, 1, 0, 1, 0, 0, 0, 1]
    path = tmp_path / "h.ser"
    path.write_text(out)
    assert run(capsys, "series", "norm", str(path))[1].strip() == "2^-1"


def test_christol_round_trip_through_files(capsys, tm_file, tmp_path):
    code, out, _ = run(capsys, "--format", "structured", "christol", "to-poly", tm_file)
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "holds mod X^256"
    P = parse_mpoly(data["polynomial"], 2, 1)
    assert P.degree(0) == 2
    code, out, _ = run(capsys, "--trunc", "256", "christol", "to-automaton", data["polynomial"], "--seed", "0")
    assert code == 0
    assert parse_automaton(out).sequence(256) == thue_morse().sequence(256)


def test_tyszka_witness(capsys):
    code, out, _ = run(capsys, "--format", "structured", "tyszka", "witness", "--poly", "(1+X)*Y1 + 1", "--root", "1")
    rows = json.loads(out)["elements"]
    x = next(r for r in rows if r["handle"] == "x")
    assert x["status"].startswith("Forced")
    code, out, _ = run(capsys, "tyszka", "witness", "--poly", "Y1^2 + Y1 + X", "--tc")
    assert code == 0 and "Forced" in out


def test_tyszka_enumerate(capsys):
    argv = ("--format", "structured", "tyszka", "enumerate", "--field", "4", "--set", "0", "1", "2", "3")
    # without pinned constants the zero map also qualifies
    assert json.loads(run(capsys, *argv)[1])["count"] == 3
    assert json.loads(run(capsys, *argv, "--constants", "0", "1")[1])["count"] == 2


def test_counterexample_structured_deterministic(capsys):
    argv = ("--format", "structured", "--trunc", "64", "--seed", "9", "tyszka", "counterexample")
    a, b = run(capsys, *argv)[1], run(capsys, *argv)[1]
    assert a == b
    data = json.loads(a)
    assert data["forced"] and not data["degenerate"]


def test_eqsys_pipeline(capsys, tmp_path):
    code, out, _ = run(capsys, "eqsys", "example", "--h1", "1 + X + X^2")
    path = tmp_path / "ex.sys"
    path.write_text(out)
    sys_ = parse_system(out)
    assert sys_.n == 3
    code, out, _ = run(capsys, "--format", "structured", "eqsys", "reduce", str(path))
    data = json.loads(out)
    assert data["annihilators"]["H2"] == "Y1 + X^3 + X + 1"
    code, out, _ = run(capsys, "eqsys", "split", str(path), "--poly", "1")
    split = parse_system(out)
    assert len(split.sigma) == 3
    split_path = tmp_path / "split.sys"
    split_path.write_text(out)
    code, out, _ = run(capsys, "eqsys", "eliminate", str(split_path), "--var", "1", "--trace")
    assert code == 0 and "eliminate F" in out


def test_eqsys_witness_system(capsys, tmp_path):
    code, out, _ = run(capsys, "eqsys", "witness", "--poly", "(1+X)*Y1 + 1", "--root", "1")
    path = tmp_path / "w.sys"
    path.write_text(out)
    code, out, _ = run(capsys, "eqsys", "reduce", str(path))
    assert code == 0 and out.startswith("x: (X + 1)*Y1 + 1")


def test_eliminating_target_is_an_error(capsys, tmp_path):
    out = run(capsys, "eqsys", "example", "--h1", "1 + X")[1]
    path = tmp_path / "ex.sys"
    path.write_text(out)
    code, _, err = run(capsys, "eqsys", "eliminate", str(path), "--var", "3")
    assert code == 1 and "distinguished" in err
