import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ladderlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_sym_poschl_teller(capsys):
    code, out, _ = run(capsys, "spectrum", "--model", "sym-poschl-teller", "--g", "1", "--n-max", "5")
    assert code == 0
    E = [float(r["E_closed"]) for r in table(out)]
    assert np.allclose(E, [0, 1.5, 4, 7.5, 12, 17.5])


def test_spectrum_morse_truncates(capsys):
    code, out, err = run(capsys, "spectrum", "--model", "morse", "--g", "3.7", "--n-max", "10")
    assert code == 0 and len(table(out)) == 4 and "4 bound levels" in err


def test_spectrum_harmonic_json(capsys):
    code, out, _ = run(capsys, "spectrum", "--model", "harmonic", "--n-max", "3", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and [r["E_iterated"] for r in rows] == [0, 1, 2, 3]


@pytest.mark.parametrize("argv", [
    ["--model", "wilson", "--a", "1,1,1,1"],
    ["--model", "askey-wilson", "--a", "0.5,0.5,0.5,0.5", "--q", "0.5"],
])
def test_verify_passes(capsys, argv):
    code, out, _ = run(capsys, "verify", *argv)
    rows = table(out)
    assert code == 0 and rows and all(r["pass"] == "True" for r in rows)
    assert set(rows[0]) == {"model", "params_hash", "n", "check_name", "residual", "tolerance", "pass"}


def test_verify_constraint_violation(capsys):
    code, _, err = run(capsys, "verify", "--model", "wilson", "--a", "-1,1,1,1")
    assert code == 2 and "a_j > 0 violated" in err


def test_unknown_model_is_usage_error(capsys):
    code, _, err = run(capsys, "spectrum", "--model", "kepler")
    assert code == 2 and "unknown model" in err


def test_bad_flag_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--bogus"])
    assert exc.value.code == 2


def test_classical_meixner_pollaczek(capsys):
    code, out, err = run(capsys, "classical", "--model", "meixner-pollaczek", "--a", "1", "--x0", "0.5", "--p0", "0.2", "--periods", "3")
    rows = table(out)
    assert code == 0
    assert max(float(r["abs_diff"]) for r in rows) <= 1e-6
    assert list(rows[0]) == ["t", "x", "p", "eta", "eta_closed_form", "abs_diff"]


def test_coherent_sym_poschl_teller(capsys):
    code, out, _ = run(capsys, "coherent", "--model", "sym-poschl-teller", "--g", "1", "--lambda", "0.3", "--variant", "a-prime")
    rows = table(out)
    assert code == 0 and max(float(r["abs_diff"]) for r in rows) < 1e-8


def test_coherent_without_closed_form(capsys):
    code, out, err = run(capsys, "coherent", "--model", "wilson", "--lambda", "0.1")
    assert code == 0 and "no closed form" in err
    assert table(out)[0]["closed_re"] == ""


def test_coherent_finite_model_refused(capsys):
    code, _, _ = run(capsys, "coherent", "--model", "soliton")
    assert code == 2


def test_classify_negative(capsys):
    code, out, _ = run(capsys, "classify", "--negative", "rosen-morse", "--g", "2", "--mu", "1")
    rows = table(out)
    assert code == 0 and float(rows[0]["best_fit_residual"]) > 1e-3


def test_classify_construction(capsys):
    code, out, err = run(capsys, "classify", "--r1", "1", "--r0-0", "4", "--c", "-1", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["matched_model"]["name"] == "SymPoschlTeller"
    assert max(doc["residuals"].values()) <= 1e-10


def test_classify_zero_ground(capsys):
    code, out, _ = run(capsys, "classify", "--r1", "-1", "--r0-0", "3", "--rm1-0", "0.4", "--c1", "0.3", "--c2", "1", "--zero-ground", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["residuals"]["prepotential"] <= 1e-9


def test_describe(capsys):
    code, out, _ = run(capsys, "describe", "--model", "askey-wilson", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["energies"][1] == pytest.approx(0.46875)


def test_output_file_and_metadata(tmp_path, capsys):
    out = tmp_path / "spec.csv"
    argv = ["spectrum", "--model", "wilson", "--n-max", "6", "--output", str(out)]
    assert main(argv) == 0
    first = out.read_bytes()
    meta = json.loads((tmp_path / "spec.csv.meta.json").read_text())
    assert "version" in meta
    assert main(argv) == 0
    assert out.read_bytes() == first  # deterministic data file


def test_json_floats_keep_17_digits(capsys):
    _, out, _ = run(capsys, "spectrum", "--model", "sym-poschl-teller", "--g", "0.3", "--n-max", "2", "--format", "json")
    rows = json.loads(out)
    assert rows[1]["E_closed"] == 0.8  # 1 * (1/2 + 0.3) round-trips exactly


def test_config_file_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nmodel = sym-poschl-teller\ng = 2\nn-max = 2\n")
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg))
    assert code == 0 and [float(r["E_closed"]) for r in table(out)] == [0, 2.5, 6]
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--g", "1")
    assert [float(r["E_closed"]) for r in table(out)] == [0, 1.5, 4]


def test_bad_config_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("model harmonic\n")
    code, _, _ = run(capsys, "spectrum", "--config", str(cfg))
    assert code == 2


def test_thread_setting(monkeypatch, capsys):
    monkeypatch.setenv("LADDERLAB_THREADS", "2")
    code, out, _ = run(capsys, "verify", "--model", "meixner-pollaczek", "--n-max", "4")
    threaded = table(out)
    monkeypatch.setenv("LADDERLAB_THREADS", "1")
    code1, out1, _ = run(capsys, "verify", "--model", "meixner-pollaczek", "--n-max", "4")
    assert code == code1 == 0
    assert [r["check_name"] for r in threaded] == [r["check_name"] for r in table(out1)]
    monkeypatch.setenv("LADDERLAB_THREADS", "0")
    code, _, err = run(capsys, "verify", "--model", "harmonic")
    assert code == 2 and "LADDERLAB_THREADS" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ladderlab", "spectrum", "--model", "harmonic", "--n-max", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("n,E_closed")
