import pytest

from mclsearch import artifacts as art
from mclsearch import cli, search


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_build_graph_report(tmp_path, capsys):
    code, out, _ = run(capsys, "build-graph", "--out", tmp_path / "a")
    assert code == 0
    kv = art.parse_kv((tmp_path / "a" / "build-graph.kv").read_text())
    assert kv["group_order"] == "1796256000"
    assert kv["srg"] == "275,112,30,56"
    assert kv["global_parameters"] == "[[0,0,112],[1,30,81],[56,56,0]]"
    assert kv["lines"] == "15400"
    run(capsys, "build-graph", "--out", tmp_path / "b")
    for name in ("graph.txt", "build-graph.txt", "build-graph.kv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_build_graph_creates_output_dir(tmp_path, capsys):
    target = tmp_path / "x" / "y"
    assert run(capsys, "build-graph", "--out", target)[0] == 0
    assert (target / "graph.txt").exists()


def test_enum_lines_and_checksum(tmp_path, capsys):
    code, out, _ = run(capsys, "enum-lines", "--out", tmp_path)
    assert code == 0
    kv = art.parse_kv(out)
    assert kv["lines"] == "15400" and kv["per_vertex"] == "280"
    assert kv["checksum"] == "2208ec88c94806b8"
    assert kv["first"] == "1,2,17,45,193"


def test_verify_rejects_corrupted_lines(tmp_path, capsys):
    run(capsys, "enum-lines", "--out", tmp_path)
    text = (tmp_path / "lines.txt").read_text().splitlines()
    text[10] = "1 2 3 4 5"
    (tmp_path / "bad.txt").write_text("\n".join(text) + "\n")
    code, out, _ = run(capsys, "verify", "--lines", tmp_path / "bad.txt")
    assert code == 1
    assert out.split()[0] == "FAIL" and "checksum" in out


def test_enum_bundles_budget_exit_code(tmp_path, capsys):
    code, out, _ = run(capsys, "enum-bundles", "--point", 1, "--budget", 1000, "--out", tmp_path)
    assert code == 2
    assert art.parse_kv(out)["complete"] == "False"


def test_classify(capsys):
    rep = search.representative(29)
    code, out, _ = run(capsys, "classify", "--bundle", ",".join(map(str, rep)))
    assert code == 0
    assert out.splitlines()[1].split()[:2] == ["29", "1"]


def test_classify_rejects_non_bundle(capsys):
    rep = list(search.representative(29))
    rep[0] = rep[1]
    code, _, err = run(capsys, "classify", "--bundle", ",".join(map(str, rep)))
    assert code == 1 and "bundle" in err


def test_pair_stats(capsys, tmp_path):
    code, out, _ = run(capsys, "pair-stats", "--class", 36, "--p2", 8, "--out", tmp_path)
    assert code == 0
    kv = art.parse_kv(out)
    assert (kv["p2"], kv["l"], kv["N"], kv["N1"]) == ("8", "36", "396552", "1180")


def test_large_case_needs_budget(capsys, tmp_path):
    code, _, err = run(capsys, "run-case", "--class", 20, "--out", tmp_path)
    assert code == 1 and "--budget" in err


def test_point_set_size_limit(capsys, tmp_path):
    code, _, err = run(capsys, "run-case", "--class", 29, "--n", 106, "--out", tmp_path)
    assert code == 1 and "105" in err


def test_bad_flags_exit(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["run-case", "--class", "36", "--budget", "0"])
    assert e.value.code != 0


def test_run_case_enumeration_only(tmp_path, capsys):
    code, out, _ = run(capsys, "run-case", "--class", 36, "--depth", 0, "--out", tmp_path)
    assert code == 0
    kv = art.parse_kv((tmp_path / "case-36.kv").read_text())
    assert (kv["p2"], kv["N"], kv["l"], kv["N2"], kv["N3"]) == ("8", "396552", "36", "1231", "1160")
    assert kv["outcome"] == "enumerated"
    assert "wall_s" in out and "wall_s" not in (tmp_path / "case-36.txt").read_text()


def test_run_case_rerun_and_resume(tmp_path, capsys):
    args = ["run-case", "--class", 29, "--max-seeds", 1, "--seeds-dir", tmp_path / "seeds"]
    ck = tmp_path / "ck.jsonl"
    code, out, _ = run(capsys, *args, "--checkpoint", ck, "--out", tmp_path / "a")
    # one seed of 67 was run, so the case as a whole is not finished
    assert code == 2 and "outcome=cap_hit" in out
    first = ck.read_text()
    assert first
    run(capsys, *args, "--checkpoint", ck, "--out", tmp_path / "b")
    assert ck.read_text() == first
    for name in ("case-29.txt", "case-29.kv", "case-29.seeds.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    seeds = sorted((tmp_path / "seeds").iterdir())
    assert len(seeds) == 67

    code, out, _ = run(capsys, "select-points", "--seed", seeds[0])
    assert code == 0
    kv = art.parse_kv(out)
    assert kv["S"] == "105" and len(kv["points"].split(",")) == 9
    assert kv["points"] in (tmp_path / "a" / "case-29.seeds.txt").read_text()

    bad = tmp_path / "bad-seed.txt"
    bad.write_text(seeds[0].read_text().replace("2208ec88c94806b8", "0000000000000000"))
    code, _, err = run(capsys, "select-points", "--seed", bad)
    assert code == 1 and "checksum" in err
