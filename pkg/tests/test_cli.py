import io
import subprocess
import sys

import pytest

from coopdyn.cli import main
from coopdyn.constructions import make_almost_coop_2d
from coopdyn.mapfile import read_map_file, save_map_file, write_map_file
from coopdyn.monotonicity import is_cooperative


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def kv(text):
    return dict(line.split(": ", 1) for line in text.splitlines() if ": " in line)


def test_gen_and_analyze(tmp_path):
    f = tmp_path / "ex.dds"
    code, out, _ = run("gen", "almost-coop-2d", "-o", str(f))
    assert code == 0 and kv(out)["generator"] == "almost-coop-2d"
    assert read_map_file(f) == make_almost_coop_2d()
    code, out, _ = run("analyze", str(f))
    r = kv(out)
    assert code == 0
    assert r["cycle_lengths"] == "4"
    assert r["cooperativity"] == "almost_cooperative"
    assert r["exception_pair"] == "2 1"


def test_analyze_selected_sections_and_report(tmp_path):
    f = tmp_path / "g.dds"
    rep = tmp_path / "r.txt"
    assert run("gen", "g-pi", "--n", "3", "--p", "2", "-o", str(f))[0] == 0
    code, out, _ = run("analyze", str(f), "--irred", "--edges", "strong", "--report", str(rep))
    assert code == 0
    assert "cooperativity" not in out and kv(out)["strongly_irreducible"] == "True"
    assert out.endswith("1 2\n2 3\n3 1\n")
    assert rep.read_text() == out


def test_quiet(tmp_path):
    f = tmp_path / "g.dds"
    assert run("--quiet", "gen", "irlong", "--n", "4", "-o", str(f)) == (0, "", "")
    assert run("gen", "irlong", "--n", "4", "-o", str(f), "--quiet") == (0, "", "")


def test_gen_germanex_report(tmp_path):
    f = tmp_path / "ge.dds"
    code, out, _ = run("gen", "germanex", "--n", "12", "--seed", "3", "-o", str(f))
    r = kv(out)
    assert code == 0 and r["cycle_length"] == "924"
    assert r["union_covers_all_arcs"] == "True" and r["irreducible_along_D"] == "False"


def test_embed(tmp_path):
    src, dst = tmp_path / "a.dds", tmp_path / "b.dds"
    save_map_file(make_almost_coop_2d(), src)
    code, _, err = run("embed", str(src), "--target-n", "3", "--target-p", "2", "-o", str(dst))
    assert code == 1 and "FeasibilityError" in err
    code, out, _ = run("embed", str(src), "--target-n", "4", "--target-p", "2", "-o", str(dst))
    assert code == 0 and "phi(0 0)" in out
    assert is_cooperative(read_map_file(dst))


def test_smale_command(tmp_path):
    src, dst = tmp_path / "p.dds", tmp_path / "g.dds"
    src.write_text("ddsmap 1\nn 2\nlevels 3 3\nkind partial\n0 2 -> 1 1\n2 0 -> 2 1\n")
    assert run("smale", str(src), "-o", str(dst))[0] == 0
    g = read_map_file(dst)
    assert g((0, 2)) == (1, 1) and g((2, 0)) == (2, 1) and is_cooperative(g)
    assert run("smale", str(dst), "-o", str(src))[0] == 2  # total map given


def test_discretize_command(tmp_path):
    src, dst = tmp_path / "s.dds", tmp_path / "g.dds"
    src.write_text("ddsmap 1\nn 1\nlevels 3\nkind sampled\n0 -> 0.1\n1 -> 0.4\n2 -> 0.9\n")
    code, out, _ = run("discretize", str(src), "-o", str(dst))
    assert code == 0
    assert write_map_file(read_map_file(dst)).endswith("0 -> 0\n1 -> 1\n2 -> 2\n")
    assert float(kv(out)["approximation_error"]) == pytest.approx(0.1)


def test_antichain_command():
    code, out, _ = run("antichain", "--n", "20", "--p", "2")
    assert code == 0 and kv(out)["d_exact"] == "184756"
    code, out, _ = run("antichain", "--n", "3", "--p", "3", "--oracle", "--bounds", "--clt")
    r = kv(out)
    assert code == 0 and r["oracle_width"] == "7" and r["oracle_matches"] == "True"
    assert code == 0 and r["lower_bound_ok"] == "True"


def test_verify_command_is_deterministic():
    code, out, _ = run("verify", "--suite", "clt")
    assert code == 0 and kv(out)["result"] == "pass"
    assert run("verify", "--suite", "clt")[1] == out


def test_usage_errors(tmp_path):
    assert run("verify", "--suite", "nope")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("gen", "g-pi", "-o", str(tmp_path / "x"))[0] == 2  # --n missing
    assert run("gen", "g-pi", "--n", "3", "--p", "2", "--pi", "1 2", "-o", str(tmp_path / "x"))[0] == 2
    assert run("analyze", str(tmp_path / "missing.dds"))[0] == 2


def test_parse_error_exit_code(tmp_path):
    f = tmp_path / "dup.dds"
    f.write_text("ddsmap 1\nn 1\nlevels 2\nkind partial\n0 -> 1\n0 -> 0\n")
    code, _, err = run("analyze", str(f))
    assert code == 2 and "line 6" in err


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "coopdyn.cli", "antichain", "--n", "10", "--p", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "d_exact: 252" in res.stdout
