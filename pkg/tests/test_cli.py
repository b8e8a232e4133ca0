import json

from b0lab.catalog import build_phi10, serialize_pcp
from b0lab.cli import (
    EXIT_INVALID,
    EXIT_OK,
    ResultRecord,
    cache_append,
    cache_read,
    main,
    presentation_hash,
)


def run_cli(capsys, *argv):
    try:
        main(list(argv))
    except SystemExit as exc:
        code = exc.code or 0
    else:
        code = 0
    out = capsys.readouterr()
    return code, out.out, out.err


def test_group_info_catalog(capsys):
    code, out, _ = run_cli(capsys, "group", "info", "phi10:28", "--p", "3")
    assert code == EXIT_OK
    assert "center_order: 3" in out
    assert "order: 243" in out


def test_group_info_c3_power5(capsys, tmp_path):
    path = tmp_path / "c3x5.pcp"
    path.write_text("p 3\ngens 5\nname C3^5\n")
    code, out, _ = run_cli(capsys, "group", "info", str(path))
    assert code == EXIT_OK
    assert "exponent: 3" in out


def test_group_info_invalid(capsys, tmp_path):
    bad = tmp_path / "bad.pcp"
    bad.write_text("p 3\ngens 2\ncomm 2 1 : 3^1\n")
    code, _, err = run_cli(capsys, "group", "info", str(bad))
    assert code == EXIT_INVALID


def test_b0_tensor_nonzero(capsys):
    code, out, _ = run_cli(capsys, "b0", "phi10:29", "--p", "3", "--method", "tensor", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["b0_invariants"] == [3]
    assert data["method"] == "tensor"


def test_b0_all_agreement_heisenberg(capsys, tmp_path):
    path = tmp_path / "heis.pcp"
    path.write_text("p 3\ngens 3\nname Heis27\ncomm 2 1 : 3^1\n")
    code, out, err = run_cli(capsys, "b0", str(path), "--method", "all", "--format", "json")
    assert code == EXIT_OK
    rows = json.loads(out)
    by_method = {r["method"]: r for r in rows}
    assert by_method["tensor"]["b0_invariants"] == []
    assert by_method["oracle"]["b0_invariants"] == []
    assert by_method["tensor"]["m_order"] == by_method["oracle"]["m_order"] == 9


def test_b0_oracle_cap_exit(capsys):
    code, _, err = run_cli(capsys, "b0", "phi10:28", "--p", "3", "--method", "oracle")
    assert code == 1
    assert "cap" in err


def test_verify_invalid_p(capsys):
    code, _, err = run_cli(capsys, "verify", "--p", "2")
    assert code == EXIT_INVALID


def test_catalog_list(capsys):
    code, out, _ = run_cli(capsys, "catalog", "list", "--p", "5")
    assert code == EXIT_OK
    assert "phi10_count: 6" in out


def test_isoclinism_command(capsys):
    code, out, _ = run_cli(capsys, "isoclinism", "phi10:28", "phi10:30", "--p", "3")
    assert code == EXIT_OK
    assert "isoclinic: True" in out
    code, out, _ = run_cli(capsys, "isoclinism", "phi10:28", "phi5:1^5", "--p", "3")
    assert "isoclinic: False" in out


def test_ingest(capsys, tmp_path):
    path = tmp_path / "g.pcp"
    path.write_text("p 3\ngens 4\nname X\ncomm 2 1 : 3^1\ncomm 3 1 : 4^1\n")
    code, out, _ = run_cli(capsys, "ingest", str(path), "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["order"] == 81 and data["consistent"]
    bad = tmp_path / "bad.pcp"
    bad.write_text("p 3\ngens 2\ncomm 2 1 : 9^1\n")
    code, _, err = run_cli(capsys, "ingest", str(bad))
    assert code == EXIT_INVALID


def test_cache_roundtrip(tmp_path):
    rec = ResultRecord("h", "X", 3, 5, "tensor", [3], 9, 3, 1200)
    path = tmp_path / "cache.jsonl"
    cache_append(path, rec)
    cache_append(path, rec)
    with open(path, "a") as fh:
        fh.write("{corrupt\n")
    back = cache_read(path)
    assert len(back) == 2
    assert back[0] == rec
    assert back[0].stable_key() == rec.stable_key()
    fast = ResultRecord("h", "X", 3, 5, "tensor", [3], 9, 3, 77)
    assert fast.stable_key() == rec.stable_key()  # timing excluded


def test_hash_whitespace_invariance():
    G = build_phi10(3, "28")
    from b0lab.catalog import parse_pcp

    text = serialize_pcp(G)
    noisy = "# header comment\n" + text.replace("\n", "  \n", 2)
    assert presentation_hash(parse_pcp(noisy)) == presentation_hash(G)


def test_report_deterministic(capsys, tmp_path):
    path = tmp_path / "cache.jsonl"
    cache_append(path, ResultRecord("h2", "B", 3, 5, "tensor", [], 1, 1, 5))
    cache_append(path, ResultRecord("h1", "A", 3, 5, "tensor", [3], 9, 3, 9))
    code, out1, _ = run_cli(capsys, "report", "--cache", str(path), "--format", "csv")
    code, out2, _ = run_cli(capsys, "report", "--cache", str(path), "--format", "csv")
    assert code == EXIT_OK and out1 == out2
    assert out1.index("A,") < out1.index("B,")


def test_env_override(capsys, monkeypatch):
    monkeypatch.setenv("B0LAB_ORACLE_CAP", "27")
    code, _, err = run_cli(capsys, "b0", "phi10:28", "--p", "3", "--method", "oracle")
    assert code == 1  # cap from the environment


def test_csv_columns(capsys):
    code, out, _ = run_cli(capsys, "b0", "phi10:28", "--p", "3", "--format", "csv")
    header = out.splitlines()[0]
    assert header == "name,p,n,method,b0_invariants,m_order,m0_order,elapsed_ms"
