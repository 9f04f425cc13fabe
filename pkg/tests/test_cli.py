import json
import os

import pytest

from lkit.cli import main
from lkit.exterior import Form, kahler_power, monomial, parse, serialize, wedge


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, form):
    path = tmp_path / name
    path.write_text(serialize(form))
    return str(path)


def test_check_passes_for_omega_power(tmp_path, capsys):
    f = write(tmp_path, "w2.json", kahler_power(2, 4))
    code, out, _ = run(capsys, "check", f, "--p", "1", "--q", "1", "--format", "json")
    assert code == 0
    assert json.loads(out)["aggregate"]["verdict"] == "CERTIFIED"


def test_check_inconclusive_exit_code(tmp_path, capsys):
    f = write(tmp_path, "neg.json", -kahler_power(2, 4))
    code, out, _ = run(capsys, "check", f, "--p", "1", "--q", "1")
    assert code == 2
    assert "INCONCLUSIVE" in out


def test_check_parse_error_is_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3, "p": 1, "q": 1, "terms": [{"I": [1], "J": [5], "re": 1, "im": 0}]}')
    code, _, err = run(capsys, "check", str(bad), "--p", "1", "--q", "1")
    assert code == 1
    assert "terms[0].J" in err and "out of range" in err


def test_check_rejects_wrong_bidegree(tmp_path, capsys):
    f = write(tmp_path, "w.json", kahler_power(1, 4))
    code, _, err = run(capsys, "check", f, "--p", "1", "--q", "1")
    assert code == 1 and "bidegree" in err


def test_check_rejects_missing_file(capsys):
    code, _, err = run(capsys, "check", "/nonexistent/x.json", "--p", "0", "--q", "0")
    assert code == 1 and "nonexistent" in err


def test_unknown_flag_is_input_error(capsys):
    assert run(capsys, "timorin", "--bogus")[0] == 1


def test_n_cap(capsys):
    code, _, err = run(capsys, "timorin", "--n", "9", "--trials", "1")
    assert code == 1 and "--n" in err


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("LKIT_SEED", "17")
    _, out, _ = run(capsys, "timorin", "--n", "2", "--trials", "1", "--format", "json")
    assert json.loads(out)["config"]["seed"] == 17
    _, out, _ = run(capsys, "timorin", "--n", "2", "--trials", "1", "--seed", "3", "--format", "json")
    assert json.loads(out)["config"]["seed"] == 3
    monkeypatch.setenv("LKIT_SEED", "nope")
    assert run(capsys, "timorin", "--n", "2", "--trials", "1")[0] == 1


def test_out_is_written_and_byte_stable(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "timorin", "--n", "3", "--trials", "3", "--seed", "5", "--out", str(a))[0] == 0
    assert run(capsys, "timorin", "--n", "3", "--trials", "3", "--seed", "5", "--jobs", "4",
               "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]
    assert json.loads(a.read_text())["format_version"] == 1


def test_timings_are_a_separate_section(capsys):
    _, out, _ = run(capsys, "timorin", "--n", "2", "--trials", "1", "--timings", "--format", "json")
    rep = json.loads(out)
    assert "wall_seconds" in rep["timings"]
    assert "timings" not in rep["config"]


def test_signature_command(capsys):
    code, out, _ = run(capsys, "signature", "--n", "3", "--p", "1", "--q", "1", "--format", "json")
    assert code == 0
    assert json.loads(out)["aggregate"]["signature"] == [8, 1, 0]


def test_signature_from_file(tmp_path, capsys):
    f = write(tmp_path, "one.json", Form.scalar(2))
    code, out, _ = run(capsys, "signature", f, "--p", "1", "--q", "1", "--format", "json")
    assert code == 0 and json.loads(out)["aggregate"]["signature"] == [3, 1, 0]


def test_witness_command(capsys):
    code, out, _ = run(capsys, "witness", "--n", "4", "--p", "1", "--q", "2", "--format", "json")
    assert code == 0
    rec = json.loads(out)["records"][0]
    assert rec["primitive_ok"] and rec["not_in_image_ok"]
    assert run(capsys, "witness", "--n", "4", "--p", "1", "--q", "1")[0] == 1


def test_decompose_writes_forms(tmp_path, capsys):
    om = write(tmp_path, "om.json", Form.scalar(2))
    al = write(tmp_path, "al.json", monomial(2, (1,), (1,)))
    beta_out, gamma_out = tmp_path / "beta.json", tmp_path / "gamma.json"
    code, out, _ = run(capsys, "decompose", om, al, "--beta-out", str(beta_out),
                       "--gamma-out", str(gamma_out), "--format", "json")
    assert code == 0
    beta, gamma = parse(beta_out.read_text()), parse(gamma_out.read_text())
    assert beta.allclose(Form(2, 1, 1, [0.5, 0, 0, -0.5]), atol=1e-12)
    assert gamma.allclose(Form(2, 0, 0, [-0.5j]), atol=1e-12)
    assert json.loads(out)["records"][0]["reconstruction_residual"] < 1e-12


def test_decompose_hypothesis_failure(tmp_path, capsys):
    om = write(tmp_path, "om.json", monomial(4, (1, 2), (1, 2)))
    al = write(tmp_path, "al.json", monomial(4, (1,), (1,)))
    code, out, _ = run(capsys, "decompose", om, al, "--format", "json")
    assert code == 2
    assert json.loads(out)["records"][0]["failing_r"] == 0


def test_griffiths_command_and_candidates(tmp_path, capsys):
    cand = tmp_path / "cand"
    code, out, _ = run(capsys, "griffiths", "--n", "4", "--p", "1", "--q", "1", "--trials", "3",
                       "--degenerate-eps", "1e-4", "--watch", "1e-2", "--candidates", str(cand),
                       "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["aggregate"]["candidates"] == 3
    files = sorted(os.listdir(cand))
    assert files == [f"candidate-0-{t}.json" for t in range(3)]
    dump = json.loads((cand / files[0]).read_text())
    assert dump["matrix"]["k"] == 2 and dump["p"] == 1


def test_griffiths_flag_validation(capsys):
    assert run(capsys, "griffiths", "--n", "4", "--p", "1", "--q", "1", "--k", "3")[0] == 1
    assert run(capsys, "griffiths", "--n", "4", "--p", "1", "--q", "1", "--diagonal",
               "--degenerate-eps", "1e-3")[0] == 1


@pytest.mark.parametrize("cmd", ["check", "timorin", "griffiths", "signature", "witness", "decompose"])
def test_help_exits_cleanly(cmd, capsys):
    assert run(capsys, cmd, "--help")[0] == 0


def test_check_degenerate_form_reports_t0_r0(tmp_path, capsys):
    f = write(tmp_path, "deg.json", monomial(4, (1, 2), (1, 2), 1j ** 4))
    code, out, _ = run(capsys, "check", f, "--p", "1", "--q", "1", "--format", "json")
    assert code == 2
    failure = json.loads(out)["records"][0]["failure"]
    assert failure["t"] == 0.0 and failure["r"] == 0


def test_check_non_real_form_is_input_error(tmp_path, capsys):
    f = write(tmp_path, "cx.json", monomial(4, (1, 2), (1, 3)))
    code, _, err = run(capsys, "check", f, "--p", "1", "--q", "1")
    assert code == 1 and "not real" in err


GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "timorin_n3_seed12345.json")


def _assert_close_tree(a, b, path="$"):
    if isinstance(a, float) or isinstance(b, float):
        assert a == pytest.approx(b, rel=1e-9, abs=1e-12), path
    elif isinstance(a, dict):
        assert sorted(a) == sorted(b), path
        for key in a:
            _assert_close_tree(a[key], b[key], f"{path}.{key}")
    elif isinstance(a, list):
        assert len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            _assert_close_tree(x, y, f"{path}[{i}]")
    else:
        assert a == b, path


def test_timorin_golden_report(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert run(capsys, "timorin", "--n", "3", "--trials", "10", "--seed", "12345", "--out", str(out))[0] == 0
    with open(GOLDEN) as fh:
        golden = json.load(fh)
    # floats compared to 1e-9 so the file survives a different BLAS; reruns are byte-identical
    _assert_close_tree(json.loads(out.read_text()), golden)
    assert golden["aggregate"]["alarms"] == 0
    assert all(r["lambda_min"] > 0 for r in golden["records"])


def test_signature_of_holomorphic_one_forms(capsys):
    code, out, _ = run(capsys, "signature", "--n", "3", "--p", "1", "--q", "0", "--format", "json")
    assert code == 0 and json.loads(out)["aggregate"]["signature"] == [3, 0, 0]


def test_witness_n5(capsys):
    code, out, _ = run(capsys, "witness", "--n", "5", "--p", "2", "--q", "3", "--format", "json")
    assert code == 0 and json.loads(out)["aggregate"]["ok"]


def test_decompose_primitive_and_image_inputs(tmp_path, capsys):
    Omega = kahler_power(1, 3)
    om = write(tmp_path, "om.json", Omega)
    primitive = monomial(3, (1,), (2,))
    gamma0 = Form(3, 0, 0, [2 - 1j])
    cases = [(primitive, "gamma"), (wedge(kahler_power(1, 3), gamma0), "beta")]
    for alpha, vanishing in cases:
        al = write(tmp_path, "al.json", alpha)
        beta_out, gamma_out = tmp_path / "b.json", tmp_path / "g.json"
        code, _, _ = run(capsys, "decompose", om, al, "--beta-out", str(beta_out),
                         "--gamma-out", str(gamma_out))
        assert code == 0
        beta, gamma = parse(beta_out.read_text()), parse(gamma_out.read_text())
        zero = gamma if vanishing == "gamma" else beta
        assert zero.is_zero()
        if vanishing == "beta":
            assert gamma.allclose(gamma0, atol=1e-12)


def test_griffiths_watch_dumps_near_degenerate(tmp_path, capsys):
    cand = tmp_path / "c"
    code, out, _ = run(capsys, "griffiths", "--n", "4", "--p", "1", "--q", "1", "--trials", "2",
                       "--degenerate-eps", "1e-4", "--watch", "1e-6", "--candidates", str(cand),
                       "--format", "json")
    assert code == 0
    assert json.loads(out)["aggregate"]["candidates"] >= 1
    assert os.listdir(cand)
