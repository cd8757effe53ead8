import json
import subprocess
import sys

import pytest

from wmds.cli import main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_residue_check_passes(capsys):
    code, rep = run(capsys, "residue-check", "A", "3", "--node", "2")
    assert code == 0 and rep["equal"] is True and rep["schema"] == 1


def test_parabolic_check_rejects_non_admissible(capsys):
    code, rep = run(capsys, "parabolic-check", "D", "6", "--node", "4")
    assert code == 2
    assert "not admissible" in rep["message"]


def test_tables_f4(capsys):
    code, rep = run(capsys, "tables", "F", "4")
    assert code == 0
    assert rep["admissible_nodes"] == [4]
    rows = {row["node"]: row for row in rep["orthogonal_complements"]}
    assert {n: r["type"] for n, r in rows.items()} == {3: "B3", 4: "B3"}
    assert len(rows[3]["pi_new"]) == 2 and len(rows[4]["pi_new"]) == 1


@pytest.mark.parametrize(
    "args",
    [
        ("zeta", "Q", "2"),
        ("zeta", "A", "0"),
        ("residue-check", "B", "3", "--node", "1"),
        ("residue-check", "A", "3", "--node", "7"),
        ("global-check", "A", "1", "--q", "7"),
        ("global-check", "A", "2", "--degrees", "1", "2", "3"),
    ],
)
def test_config_errors(capsys, args):
    code, _ = run(capsys, *args)
    assert code == 2


def test_cap_exit_code(capsys):
    code, rep = run(capsys, "zeta", "A", "4", "--cap", "10")
    assert code == 3 and rep["error"] == "cap"


def test_global_check_and_output_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code = main(["global-check", "A", "2", "--q", "5", "--degrees", "1", "--output", str(out)])
    rep = json.loads(out.read_text())
    assert code == 0 and rep["equal"] and len(rep["cells"]) == 4


def test_text_format(capsys):
    code, out = run(capsys, "double-laced-check", "B", "3", "--format", "text")
    assert code == 0 and out.strip().endswith("PASS")


def test_reports_are_byte_identical_across_threads(capsys):
    texts = set()
    for n in ("1", "2", "8"):
        main(["zeta", "B", "3", "--threads", n])
        texts.add(capsys.readouterr().out)
    assert len(texts) == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "wmds", "kernel", "A", "5", "--node", "3"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["kernels"][0]["factors"] == ["(1 - x2*x4)", "(1 - x1*x5)"]
