"""Command-line and report-layer tests.

Group documents exercise all three ingestion forms (preset, permutations,
table).  End-to-end runs go through ``main(argv)`` with captured stdout, so
the exit-code contract (0 pass / 1 fail / 2 usage / 3 hypothesis-not-met)
and the determinism guarantee are checked exactly as a shell user sees them.
"""

import json

import pytest

from qcoh.cli import main
from qcoh.groups import is_isomorphic, preset, FiniteGroup
from qcoh.report import (
    FAIL,
    HYPOTHESIS_NOT_MET,
    PASS,
    SKIPPED,
    GroupSpecError,
    Report,
    group_to_document,
    load_group_document,
    parse_group_document,
)


# ---------------------------------------------------------------------------
# group documents


def test_document_preset():
    g = parse_group_document({"preset": {"name": "heisenberg", "params": [3]}})
    assert g.order == 27
    assert is_isomorphic(g, preset("heisenberg", [3]))


def test_document_preset_no_params():
    g = parse_group_document({"preset": {"name": "quaternion8"}})
    assert g.order == 8


def test_document_preset_direct_product():
    doc = {"preset": {"name": "direct_product",
                      "params": [["cyclic", [4]], ["cyclic", [2]]]}}
    g = parse_group_document(doc)
    assert g.order == 8
    assert is_isomorphic(g, preset("direct_product", [("cyclic", [4]), ("cyclic", [2])]))


def test_document_permutations_cycle():
    g = parse_group_document({"permutations": {"degree": 3, "generators": [[2, 3, 1]]}})
    assert g.order == 3
    assert is_isomorphic(g, preset("cyclic", [3]))


def test_document_permutations_dihedral():
    doc = {"permutations": {"degree": 4, "generators": [[2, 3, 4, 1], [1, 4, 3, 2]]}}
    g = parse_group_document(doc)
    assert g.order == 8
    assert is_isomorphic(g, preset("dihedral4"))


@pytest.mark.parametrize(
    "gens",
    [[[1, 2]], [[2, 2, 1]], [[0, 1, 2]], [[2, 3, 4]]],
    ids=["short", "not-a-bijection", "zero-based", "out-of-range"],
)
def test_document_permutations_rejects(gens):
    with pytest.raises(GroupSpecError) as exc:
        parse_group_document({"permutations": {"degree": 3, "generators": gens}})
    assert "$.permutations" in exc.value.location


def test_document_table_roundtrip():
    doc = group_to_document(preset("cyclic", [4]))
    assert set(doc) <= {"table", "labels", "name"}
    g = parse_group_document(doc)
    assert is_isomorphic(g, preset("cyclic", [4]))


def test_document_table_identity_not_first():
    with pytest.raises(GroupSpecError) as exc:
        parse_group_document({"table": [[1, 0], [0, 1]]})
    assert exc.value.location == "$.table"


def test_document_table_not_square():
    with pytest.raises(GroupSpecError):
        parse_group_document({"table": [[0, 1], [1]]})


@pytest.mark.parametrize(
    "doc",
    [
        {},
        {"preset": {"name": "cyclic", "params": [2]}, "table": [[0]]},
        {"tabel": [[0]]},
    ],
    ids=["empty", "two-keys", "typo-key"],
)
def test_document_exactly_one_form(doc):
    with pytest.raises(GroupSpecError) as exc:
        parse_group_document(doc)
    assert exc.value.location == "$"


def test_document_labels_applied():
    doc = {"table": [[0, 1], [1, 0]], "labels": ["e", "t"]}
    g = parse_group_document(doc)
    assert g.label(1) == "t"


def test_document_reindexes_identity_on_emit():
    base = preset("cyclic", [3])
    # relabel so the identity sits at index 1
    perm = [1, 0, 2]
    inv = [perm.index(k) for k in range(3)]
    table = [
        [perm[base.mul(inv[a], inv[b])] for b in range(3)] for a in range(3)
    ]
    moved = FiniteGroup.from_table(table)
    assert moved.identity == 1
    doc = group_to_document(moved)
    rebuilt = parse_group_document(doc)
    assert rebuilt.identity == 0
    assert is_isomorphic(rebuilt, base)


def test_load_group_document_missing_file(tmp_path):
    with pytest.raises(GroupSpecError):
        load_group_document(str(tmp_path / "none.json"))


def test_load_group_document_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(GroupSpecError):
        load_group_document(str(path))


# ---------------------------------------------------------------------------
# report object


def _report(*statuses):
    rep = Report(("demo",), q=2)
    for k, status in enumerate(statuses):
        rep.add(f"check-{k}", status, "detail", timing=0.01 * k)
    return rep


@pytest.mark.parametrize(
    "statuses, code",
    [
        ((PASS, PASS), 0),
        ((PASS, FAIL), 1),
        ((FAIL, HYPOTHESIS_NOT_MET), 1),
        ((PASS, HYPOTHESIS_NOT_MET), 0),
        ((HYPOTHESIS_NOT_MET,), 3),
        ((HYPOTHESIS_NOT_MET, HYPOTHESIS_NOT_MET), 3),
        ((SKIPPED, PASS), 0),
        ((SKIPPED,), 0),
        ((), 0),
    ],
)
def test_report_exit_codes(statuses, code):
    assert _report(*statuses).exit_code == code


def test_report_rejects_unknown_status():
    rep = Report(("demo",), q=2)
    with pytest.raises(ValueError):
        rep.add("x", "maybe", "detail")


def test_report_json_roundtrip_and_timings_block():
    rep = _report(PASS, HYPOTHESIS_NOT_MET)
    data = json.loads(rep.render_json())
    assert data["exit_code"] == 0
    assert [r["name"] for r in data["checks"]] == ["check-0", "check-1"]
    assert "timing" not in data["checks"][0]
    assert set(data["timings"]) == {"check-0", "check-1"}
    again = json.loads(rep.render_json())
    assert again == data


def test_report_markdown_mentions_every_record():
    rep = _report(PASS, FAIL, SKIPPED)
    text = rep.render_markdown()
    assert "**PASS** check-0" in text
    assert "**FAIL** check-1" in text
    assert "**SKIPPED** check-2" in text
    assert "exit status: 1" in text
    assert "q = 2" in text


def test_report_modulus_block_prime_power():
    rep = Report(("demo",), q=9)
    data = json.loads(rep.render_json())
    assert data["modulus"] == {"q": 9, "p": 3, "s": 2, "delta": 1}


# ---------------------------------------------------------------------------
# end-to-end command runs


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_cli_series_heisenberg(capsys):
    code, out = _run(capsys, "series", "--preset", "heisenberg", "--params", "3", "--q", "3")
    assert code == 0
    assert "orders [27, 3, 1]" in out
    assert "level3-refinement — order 1" in out


def test_cli_series_cyclic16_q4(capsys):
    code, out = _run(capsys, "series", "--preset", "cyclic", "--params", "16", "--q", "4")
    assert code == 0
    assert "orders [16, 4, 1]" in out
    assert "level3-refinement — order 2" in out


def test_cli_cohomology_klein(capsys):
    code, out = _run(
        capsys, "cohomology", "--preset", "elementary_abelian",
        "--params", "p=2", "d=2", "--q", "2", "--format", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["machine"]["h2-basis"]["invariant_factors"] == [2, 2, 2]
    assert data["machine"]["h2-decomposable"]["order"] == 8
    assert data["machine"]["quadratic-degree2"]["dec_order"] == 8


def test_cli_cohomology_rank_one(capsys):
    code, out = _run(capsys, "cohomology", "--preset", "cyclic", "--params", "3",
                     "--q", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["machine"]["h2-basis"]["invariant_factors"] == [3]
    assert data["machine"]["img-bockstein"]["order"] == 3


def test_cli_cohomology_cap_skips(capsys):
    code, out = _run(capsys, "cohomology", "--preset", "heisenberg", "--params", "3",
                     "--q", "3", "--h2-cap", "16")
    assert code == 0
    assert "SKIPPED** h2-basis" in out


def test_cli_pairing(capsys):
    code, out = _run(capsys, "pairing", "--preset", "dihedral4", "--q", "2")
    assert code == 0
    assert "perfect: True" in out


def test_cli_duality_check(capsys):
    code, out = _run(capsys, "duality-check", "--preset", "modular", "--params", "3",
                     "--q", "3", "--triple", "bock", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert all(r["status"] == "pass" for r in data["checks"])
    assert data["machine"]["duality"]["triple"] == "bock"


def test_cli_theorem_d_pass(capsys):
    code, out = _run(capsys, "theorem-d", "--preset", "heisenberg", "--params", "3", "--p", "3")
    assert code == 0
    assert "equal: True" in out


def test_cli_theorem_d_hypothesis_not_met(capsys):
    code, out = _run(capsys, "theorem-d", "--preset", "quaternion8", "--p", "2")
    assert code == 3
    assert "HYPOTHESIS-NOT-MET" in out


def test_cli_reconstruct(capsys):
    code, out = _run(capsys, "reconstruct", "--preset", "heisenberg", "--params", "3",
                     "--q", "3", "--triple", "dec-cup")
    assert code == 0
    assert "reconstruction isomorphic: true" in out


def test_cli_free_model_emit_roundtrip(tmp_path, capsys):
    emitted = tmp_path / "flat23.json"
    code, out = _run(capsys, "free-model", "--d", "2", "--q", "3",
                     "--variant", "flat", "--emit", str(emitted))
    assert code == 0
    assert "order 27" in out
    assert "isomorphic to heisenberg(3): true" in out
    doc = json.loads(emitted.read_text(encoding="utf-8"))
    assert parse_group_document(doc).order == 27
    code, out = _run(capsys, "series", "--group", str(emitted), "--q", "3")
    assert code == 0
    assert "orders [27, 3, 1]" in out


def test_cli_free_model_sharp_has_basis(capsys):
    code, out = _run(capsys, "free-model", "--d", "2", "--q", "2", "--variant", "sharp")
    assert code == 0
    assert "canonical-basis" in out
    assert "SKIPPED" not in out


def test_cli_emit_writes_report(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out = _run(capsys, "series", "--preset", "cyclic", "--params", "4",
                     "--q", "2", "--format", "json", "--emit", str(target))
    assert code == 0
    assert json.loads(target.read_text(encoding="utf-8")) == json.loads(out)


def test_cli_determinism_excluding_timings(capsys):
    argv = ("duality-check", "--preset", "dihedral4", "--q", "2", "--format", "json")
    _, first = _run(capsys, *argv)
    _, second = _run(capsys, *argv)
    a, b = json.loads(first), json.loads(second)
    a.pop("timings")
    b.pop("timings")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


@pytest.mark.parametrize(
    "argv",
    [
        ("series", "--preset", "nosuch", "--q", "2"),
        ("series", "--q", "2"),
        ("series", "--preset", "cyclic", "--params", "4"),
        ("series", "--preset", "cyclic", "--params", "4", "--q", "6"),
        ("series", "--preset", "cyclic", "--params", "4", "--params", "x=1", "--q", "2"),
        ("series", "--preset", "cyclic", "--q", "2"),
        ("series", "--preset", "heisenberg", "--params", "5", "--q", "5",
         "--max-order", "100"),
        ("theorem-d", "--preset", "cyclic", "--params", "4"),
        ("free-model", "--q", "3"),
        ("verify", "nosuite"),
        ("series", "--group", "/nonexistent/g.json", "--q", "2"),
    ],
    ids=[
        "unknown-preset", "no-group", "no-q", "bad-modulus", "bad-param-key",
        "missing-params", "max-order", "theorem-d-no-p", "free-model-no-d",
        "unknown-suite", "missing-document",
    ],
)
def test_cli_usage_errors_exit_2(capsys, argv):
    code = main(list(argv))
    err = capsys.readouterr().err
    assert code == 2
    assert err.startswith("error:")


def test_cli_verify_linalg(capsys):
    code, out = _run(capsys, "verify", "linalg")
    assert code == 0
    assert "200/200" in out


def test_cli_verify_dual_basis(capsys):
    code, out = _run(capsys, "verify", "dual-basis", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data["checks"]) == 7
    assert all(r["status"] == "pass" for r in data["checks"])
