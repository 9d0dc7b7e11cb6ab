from fractions import Fraction

import pytest

from g2modpoly import cli, interp, modpoly


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_humbert(capsys):
    code, out = run(capsys, "humbert", "--p", "3")
    assert code == 0
    assert out.strip() == "a=250 component_degree=24 H_degree=120"


def test_cosets_gamma0(capsys):
    code, out = run(capsys, "cosets", "--p", "2", "--kind", "igusa")
    assert code == 0 and out.strip() == "15"


def test_config_errors(capsys):
    assert cli.run(["humbert", "--p", "4"]) == cli.EXIT_CONFIG
    assert cli.run(["cosets", "--p", "2", "--kind", "bprime"]) \
        == cli.EXIT_CONFIG
    assert cli.run(["cosets", "--p", "3", "--precision", "64"]) \
        == cli.EXIT_CONFIG
    # imaginary part not positive definite
    assert cli.run(["theta", "--tau", "1j,-2j,0"]) == cli.EXIT_CONFIG
    capsys.readouterr()


def test_theta_deterministic(capsys):
    args = ("theta", "--precision", "128", "--seed", "7")
    code1, out1 = run(capsys, *args)
    code2, out2 = run(capsys, *args)
    assert code1 == code2 == 0 and out1 == out2
    assert len(out1.strip().splitlines()) == 10
    _, out3 = run(capsys, "theta", "--precision", "128", "--seed", "8")
    assert out3 != out1


def test_invariants_explicit_point(capsys):
    code, out = run(capsys, "invariants", "--kind", "bprime",
                    "--precision", "128",
                    "--tau", "0.11+1.17j,-0.23+1.71j,0.05+0.31j")
    assert code == 0
    lines = out.strip().splitlines()
    assert [ln.split()[0] for ln in lines] == ["f1", "f2", "f3"]


def _fake_set(path):
    D = interp.TriPoly({(0, 0, 0): Fraction(1)})
    tab = {0: interp.TriPoly({(2, 0, 0): Fraction(3)})}
    mset = modpoly.ModularPolynomialSet(3, "bprime", dict(tab), dict(tab),
                                        dict(tab), D)
    modpoly.save_set(mset, str(path))


def test_degrees(capsys, tmp_path):
    _fake_set(tmp_path)
    code, out = run(capsys, "degrees", "--input", str(tmp_path))
    assert code == 0
    assert "phi1 0 2 0 0" in out and out.strip().endswith("den - 0 0 0")


def test_verify_bad_set_exits_1(capsys, tmp_path):
    _fake_set(tmp_path)
    code, out = run(capsys, "verify", "--input", str(tmp_path),
                    "--trials", "1", "--precision", "128")
    assert code == cli.EXIT_VERIFY
    assert any(ln.startswith("FAIL") for ln in out.splitlines())
    assert "den_total_degree" in out


def test_verify_missing_input(capsys):
    assert cli.run(["verify", "--input", "/nonexistent/dir"]) \
        == cli.EXIT_VERIFY
    capsys.readouterr()
