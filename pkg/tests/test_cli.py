import json

import pytest

from smspace.cli import main

STAGES = "pad,symmetrize,split,normalize,compose"


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main(["build", "--machine", "toy", "--stages", STAGES + ",multiply:2",
                 "-o", str(d / "sl.json")]) == 0
    assert main(["compile", "--smachine", str(d / "sl.json"), "-o", str(d / "g.json")]) == 0
    return d


def test_build_writes_json(files):
    doc = json.loads((files / "sl.json").read_text())
    assert "rules" in doc


def test_odd_copy_count_is_rejected(tmp_path, capsys):
    code = main(["build", "--machine", "toy", "--stages", STAGES + ",multiply:3",
                 "-o", str(tmp_path / "x.json")])
    assert code == 3
    assert "even" in capsys.readouterr().err


def test_space_with_witness_and_verify(files, capsys):
    out, der = files / "space.json", files / "der.json"
    code = main(["space", "--presentation", str(files / "g.json"), "--smachine", str(files / "sl.json"),
                 "--input", "a a", "--cap", "8", "--derivation-out", str(der), "-o", str(out)])
    assert code == 0
    res = json.loads(out.read_text())
    assert res["witness_space"] == 41 and res["status"] == "unreachable"
    capsys.readouterr()
    assert main(["verify", str(der), "--presentation", str(files / "g.json")]) == 0
    assert capsys.readouterr().out.strip() == "ok space=41"
    # a corrupted derivation fails at the step we broke
    doc = json.loads(der.read_text())
    doc["moves"][3] = {"op": "cancel", "word": 0, "pos": 0}
    der.write_text(json.dumps(doc))
    assert main(["verify", str(der), "--presentation", str(files / "g.json")]) == 3
    assert capsys.readouterr().out.startswith("fail at step 3")


def test_space_of_a_word(files):
    out = files / "w.json"
    assert main(["space", "--presentation", str(files / "g.json"), "--word", "a -a",
                 "--cap", "4", "-o", str(out)]) == 0
    res = json.loads(out.read_text())
    assert res["status"] == "proven" and res["space"] == "2"


def test_table_and_fit(files, capsys):
    words = files / "words.json"
    words.write_text(json.dumps([["a", "-a"], ["-a", "a"]]))
    table = files / "t.csv"
    assert main(["table", "--presentation", str(files / "g.json"), "--n-max", "2", "--cap", "4",
                 "--words", str(words), "-o", str(table)]) == 0
    assert table.read_text() == "n,space,cap,status\n2,2,4,proven\n"
    capsys.readouterr()
    assert main(["fit", "--table", str(table), "--g", "identity"]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_fit_square_against_identity_table(tmp_path, capsys):
    f = tmp_path / "f.csv"
    g = tmp_path / "g.csv"
    f.write_text("n,space,cap,status\n" + "".join(f"{n},{n * n},0,proven\n" for n in range(1, 65)))
    g.write_text("n,space,cap,status\n" + "".join(f"{n},{n},0,proven\n" for n in range(1, 65)))
    assert main(["fit", "--table", str(f), "--g", str(g), "--c-max", "8"]) == 0
    assert capsys.readouterr().out.strip() == "none"


def test_check_replays(capsys):
    assert main(["check", "--machine", "toy", "--samples", "20", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "s10=yes" in out and "ok" in out


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"machine": "toy", "stages": "pad"}))
    out = tmp_path / "m.json"
    assert main(["build", "--config", str(cfg), "-o", str(out)]) == 0
    assert json.loads(out.read_text())["tapes"] == 2


def test_bad_delta(files):
    assert main(["space", "--presentation", str(files / "g.json"), "--word", "a",
                 "--delta=-1/2"]) == 3
    assert main(["space", "--presentation", str(files / "g.json"), "--word", "a",
                 "--metric", "modified", "--delta", "1/2"]) == 3
