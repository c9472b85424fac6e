import json

import pytest

from orrforge import __version__
from orrforge.cli import main
from orrforge.search import data_text


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("ORRFORGE_TIMEOUT", raising=False)
    for name in ("14_Q8", "31_C8xC2", "06_C5", "23_A4", "22_D6"):
        (tmp_path / f"{name}.pres").write_text(data_text("catalog", f"{name}.pres"))
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_group_build_and_info(work, capsys):
    code, _, _ = run(capsys, "group", "build", "--pres", "14_Q8.pres", "-o", "q8.grp")
    assert code == 0 and (work / "q8.grp").read_text().startswith("group Q8 order 8")
    code, out, _ = run(capsys, "group", "info", "--group", "q8.grp")
    assert code == 0 and "order\t8" in out and "generalised_dihedral\tFalse" in out
    code, out, _ = run(capsys, "group", "info", "--pres", "22_D6.pres", "--json")
    rep = json.loads(out)
    assert rep["verdicts"][0]["generalised_dihedral"] is True and rep["version"] == __version__


def test_construct_then_verify(work, capsys):
    code, out, _ = run(capsys, "orr", "construct", "--family", "abelian", "--pres", "31_C8xC2.pres",
                       "-o", "s.conn", "--save-group", "g.grp", "--graph", "d.edges")
    assert code == 0
    code, out, _ = run(capsys, "verify", "--group", "g.grp", "--conn", "s.conn")
    assert (code, out.strip()) == (0, "TRIVIAL")
    code, out, _ = run(capsys, "verify", "--graph", "d.edges", "--json")
    assert code == 0 and json.loads(out)["verdicts"][0]["trivial"]


def test_verify_negative(work, capsys):
    (work / "c5.grp").write_text("group C5 order 5\n" + "\n".join(
        " ".join(str((i + j) % 5) for j in range(5)) for i in range(5)) + "\n")
    (work / "two.conn").write_text("1\n4\n")
    code, out, _ = run(capsys, "verify", "--group", "c5.grp", "--conn", "two.conn")
    assert (code, out.strip()) == (1, "NOT ORIENTED")
    (work / "cyc.edges").write_text("4 8\n" + "".join(f"{i} {(i + 1) % 4}\n{(i + 1) % 4} {i}\n"
                                                        for i in range(4)))
    code, out, _ = run(capsys, "verify", "--graph", "cyc.edges")
    assert code == 1 and out.strip() == "(1 3)"


@pytest.mark.parametrize("family, params, size", [
    ("imrich", "k=6", 13), ("bi", "ell=2,kappa=4", 51), ("bii", "ell=0,kappa=7", 14),
])
def test_construct_families(work, capsys, family, params, size):
    code, out, _ = run(capsys, "orr", "construct", "--family", family, "--params", params, "--json")
    assert code == 0 and json.loads(out)["verdicts"][0]["size"] == size


def test_classify_rows(work, capsys):
    code, out, _ = run(capsys, "classify", "--pres", "06_C5.pres")
    assert code == 0 and out.split("\t")[:3] == ["C5", "5", "HasORR"]
    code, out, _ = run(capsys, "classify", "--pres", "22_D6.pres", "--json")
    assert code == 1 and json.loads(out)["verdicts"][0]["verdict"] == "GeneralisedDihedral"
    code, out, _ = run(capsys, "classify", "--pres", "14_Q8.pres", "--deep", "--out-dir", "out")
    assert code == 1 and out.strip().split("\t") == ["Q8", "8", 'Exception("Q8")', "out/Q8.certs"]
    assert len((work / "out" / "Q8.certs").read_text().splitlines()) == 4
    code, out, _ = run(capsys, "classify", "--pres", "31_C8xC2.pres", "--out-dir", "out")
    assert code == 0 and (work / "out" / "C8xC2.conn").exists()


def test_classify_timeouts(work, capsys, monkeypatch):
    code, _, err = run(capsys, "classify", "--pres", "23_A4.pres", "--timeout", "0")
    assert code == 3 and err.startswith("timeout:")
    monkeypatch.setenv("ORRFORGE_TIMEOUT", "0")
    code, _, err = run(capsys, "classify", "--pres", "23_A4.pres")
    assert code == 3 and err.startswith("timeout:")
    monkeypatch.setenv("ORRFORGE_TIMEOUT", "soon")
    code, _, err = run(capsys, "classify", "--pres", "23_A4.pres")
    assert code == 2 and "ORRFORGE_TIMEOUT" in err


def test_export(work, capsys):
    run(capsys, "orr", "construct", "--family", "abelian", "--pres", "31_C8xC2.pres", "-o", "s.conn")
    code, out, _ = run(capsys, "export", "--pres", "31_C8xC2.pres", "--conn", "s.conn", "--format", "dot")
    assert code == 0 and out.startswith("digraph") and out.count("->") == 16 * 4
    code, out, _ = run(capsys, "export", "--pres", "31_C8xC2.pres", "--conn", "s.conn")
    assert code == 0 and out.splitlines()[0].split() == ["16", "64"]


@pytest.mark.parametrize("argv, fragment", [
    ([], "subcommand"),
    (["frobnicate"], "invalid choice"),
    (["classify"], "--group or --pres"),
    (["classify", "--pres", "missing.pres"], "cannot read"),
    (["orr", "construct", "--family", "bi", "--params", "ell=2"], "kappa"),
    (["orr", "construct", "--family", "bi", "--params", "ell"], "key=value"),
    (["orr", "construct", "--family", "bi", "--params", "ell=x,kappa=1"], "integer"),
    (["orr", "construct", "--family", "bi", "--params", "ell=1,kappa=6"], "ell <= 1"),
    (["reproduce", "--suite", "other"], "unknown suite"),
    (["export", "--pres", "06_C5.pres"], "--conn"),
])
def test_usage_errors(work, capsys, argv, fragment):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:") and fragment in err


def test_bad_presentation_input(work, capsys):
    (work / "bad.pres").write_text("gens: a\nrels: a^2, (ab)^2\n")
    code, _, err = run(capsys, "group", "info", "--pres", "bad.pres")
    assert code == 2 and "unknown generator 'b'" in err


def test_resource_limit(work, capsys):
    (work / "inf.pres").write_text("gens: a b\nrels: a^2\n")
    code, _, err = run(capsys, "group", "build", "--pres", "inf.pres", "--max-cosets", "100")
    assert code == 3 and err.startswith("error:")


def test_reproduce_tier1(work, capsys):
    code, out, _ = run(capsys, "reproduce", "--suite", "theorem1", "--tier", "1", "--timings")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "criterion\ttier\tstatus\tdetail\tseconds"
    assert all("\tPASS\t" in ln or "\tSKIP\t" in ln for ln in lines[1:])
    assert any("\tPASS\t" in ln for ln in lines[1:])


def test_threads_flag_is_accepted(work, capsys):
    code, out, _ = run(capsys, "--threads", "4", "classify", "--pres", "06_C5.pres")
    assert code == 0
