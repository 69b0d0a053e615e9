import json
import subprocess
import sys

import pytest

from graphtower.cli import main
from graphtower.graphs import kappa
from graphtower.jobspec import shipped_job
from graphtower.reports import read_edge_list

JOB_A = str(shipped_job("section5_case_a"))
JOB_B = str(shipped_job("section5_case_b"))
JOB_C = str(shipped_job("section5_case_c"))


def test_table1(tmp_path, capsys):
    assert main(["table1", "--p", "2", "--m", "3", "--n-max", "4", "--output-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "table1_p2_m3.csv").read_text().splitlines()
    assert lines[0] == "case,row,level,expected,observed,passed"
    assert all(line.endswith(",true") for line in lines[1:])
    assert "mu(X~inf/X~)" in capsys.readouterr().out


def test_kida_case_a(tmp_path, capsys):
    assert main(["kida", JOB_A, "--output-dir", str(tmp_path), "--format", "table"]) == 0
    out = capsys.readouterr().out
    assert "star_holds        false" in out
    assert "mu_tilde          3" in out
    rows = dict(line.split(",", 1) for line in (tmp_path / "section5_case_a_kida.csv").read_text().splitlines())
    assert rows["mu_tilde"] == "3" and rows["verdict"] == "ok"


@pytest.mark.parametrize("job, lhs", [(JOB_B, "6"), (JOB_C, "3")])
def test_kida_identity_cases(tmp_path, job, lhs):
    assert main(["kida", job, "--output-dir", str(tmp_path)]) == 0
    stem = job.rsplit("/", 1)[-1][:-4]
    rows = dict(line.split(",", 1) for line in (tmp_path / f"{stem}_kida.csv").read_text().splitlines())
    assert rows["lhs"] == rows["rhs"] == lhs


def test_tower_not_stabilized(tmp_path, capsys):
    code = main(["tower", JOB_C, "--n-max", "2", "--output-dir", str(tmp_path)])
    assert code == 1
    record = json.loads((tmp_path / "error.json").read_text())
    assert record["kind"] == "not-stabilized"
    assert "not stabilized" in record["message"]
    assert "not stabilized" in capsys.readouterr().err


def test_tower_csv(tmp_path):
    assert main(["tower", JOB_B, "--quotient", "base", "--output-dir", str(tmp_path)]) == 0
    text = (tmp_path / "section5_case_b_tower_base.csv").read_text()
    assert text.splitlines() == ["n,|V|,|E|,kappa,ordp", "0,3,3,3,0", "1,3,6,12,2",
                                 "2,3,12,48,4", "3,3,24,192,6", "4,3,48,768,8"]


def test_invariants(tmp_path):
    assert main(["invariants", JOB_B, "--output-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "section5_case_b_invariants.csv").read_text().splitlines()
    # kappa(full layer n) = 6 * 2^(5n) and kappa(base layer n) = 3 * 4^n
    assert lines[1:] == ["full,5,0,1,0,true", "base,2,0,0,0,true"]


def test_oracle(tmp_path):
    assert main(["oracle", JOB_A, "--n-max", "2", "--output-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "section5_case_a_oracle.csv").read_text().splitlines()
    assert len(lines) > 3 and all(line.endswith(",true") for line in lines[1:])


def test_parse_error(tmp_path):
    bad = tmp_path / "bad.job"
    bad.write_text("format_version: 1\ngroup: {p: 4, g_factors: []}\ngraph: {vertices: [a], edges: []}\n")
    assert main(["tower", str(bad), "--output-dir", str(tmp_path)]) == 2
    record = json.loads((tmp_path / "error.json").read_text())
    assert record["diagnostics"][0]["code"] == "E103"


def test_outputs_are_byte_identical(tmp_path):
    for run in ("one", "two"):
        assert main(["tower", JOB_A, "--output-dir", str(tmp_path / run)]) == 0
        assert main(["derive", JOB_A, "--level", "2", "--output-dir", str(tmp_path / run)]) == 0
    for f in sorted((tmp_path / "one").iterdir()):
        assert f.read_bytes() == (tmp_path / "two" / f.name).read_bytes()


@pytest.mark.parametrize("job, level, quotient", [(JOB_A, 3, "full"), (JOB_C, 2, "full"), (JOB_A, 2, "base")])
def test_edge_list_round_trip(tmp_path, job, level, quotient):
    from graphtower.jobspec import load_jobspec
    from graphtower.voltage import derive, quotient_voltage

    assert main(["derive", job, "--level", str(level), "--quotient", quotient,
                 "--output-dir", str(tmp_path)]) == 0
    stem = f"{job.rsplit('/', 1)[-1][:-4]}_{quotient}_level{level}"
    g = read_edge_list(tmp_path / f"{stem}_vertices.csv", tmp_path / f"{stem}_edges.csv")
    vg = load_jobspec(job).voltage
    if quotient == "base":
        vg = quotient_voltage(vg, "G")
    assert kappa(g) == kappa(derive(vg, level).graph)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "graphtower", "table1", "--p", "2", "--m", "2",
                           "--n-max", "4", "--output-dir", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
