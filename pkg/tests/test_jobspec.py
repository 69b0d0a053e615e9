import textwrap

import pytest

from graphtower.families import make_section5_voltage
from graphtower.jobspec import JobSpecError, load_jobspec, parse_jobspec, shipped_job

GOOD = textwrap.dedent("""\
    format_version: 1
    group: {p: 3, g_factors: [3, 9]}
    graph:
      vertices: [a, b]
      edges:
        - {name: x, src: a, tgt: b, voltage: {zp: 2, g: [1, 4]}, reverse_voltage: {zp: -2, g: [2, 5]}}
        - {src: b, tgt: b, voltage: {zp: 3}}
    inertia:
      a:
        - {zp: "p^2", g: [0, 0]}
        - {zp: "0", g: [1, 3]}
    task: {n_max: 2, quotient: base, output_dir: results}
    """)


def codes(document):
    with pytest.raises(JobSpecError) as info:
        parse_jobspec(document)
    return [d.code for d in info.value.diagnostics], info.value


@pytest.mark.parametrize("case", ["a", "b", "c"])
def test_shipped_jobs_match_generator(case):
    job = load_jobspec(shipped_job(f"section5_case_{case}"))
    assert job.voltage == make_section5_voltage(2, 3, case)
    assert job.edge_names == ("e1", "e2", "e3")
    assert job.n_max == 4


def test_full_document():
    job = parse_jobspec(GOOD, source="inline")
    vg = job.voltage
    assert vg.spec.p == 3 and vg.spec.g_factors == (3, 9)
    assert vg.alpha[0].zp == 2 and vg.alpha[0].g == (1, 4)
    assert vg.alpha[1].g == (2, 5)
    assert vg.alpha[2].zp == 3 and vg.alpha[2].g == (0, 0)
    assert job.edge_names == ("x", "e2")
    assert [g.zp_power for g in vg.inertia[0].generators] == [2, None]
    assert vg.inertia[1].generators == ()
    assert (job.n_max, job.quotient, job.output_dir) == (2, "base", "results")


def test_involution_violation():
    doc = GOOD.replace("reverse_voltage: {zp: -2, g: [2, 5]}", "reverse_voltage: {zp: -2, g: [1, 4]}")
    found, err = codes(doc)
    assert found == ["E106"]
    assert "voltage involution violated" in str(err)
    assert err.diagnostics[0].line == 6


def test_empty_graph():
    found, err = codes("format_version: 1\ngroup: {p: 2, g_factors: []}\ngraph: {vertices: [], edges: []}\n")
    assert "E107" in found
    assert "empty graph" in str(err)


@pytest.mark.parametrize("old, new, code", [
    ("format_version: 1", "format_version: 2", "E102"),
    ("p: 3,", "p: 6,", "E103"),
    ("g_factors: [3, 9]", "g_factors: [3, 6]", "E104"),
    ("src: b, tgt: b", "src: b, tgt: c", "E105"),
    ("vertices: [a, b]", "vertices: [a, b, a]", "E108"),
    ("g: [1, 4]}, rev", "g: [1]}, rev", "E109"),
    ('zp: "p^2"', 'zp: "q^2"', "E104"),
    ("task:", "tusk:", "E101"),
])
def test_diagnostic_codes(old, new, code):
    assert old in GOOD
    found, _ = codes(GOOD.replace(old, new))
    assert code in found


def test_yaml_syntax():
    found, err = codes("group: [1, 2\n")
    assert found == ["E100"]
    assert err.diagnostics[0].line is not None


def test_all_problems_reported():
    doc = GOOD.replace("format_version: 1", "format_version: 7").replace("src: b, tgt: b", "src: q, tgt: b")
    found, _ = codes(doc)
    assert {"E102", "E105"} <= set(found)
