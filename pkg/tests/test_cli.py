import json

from click.testing import CliRunner

from edsketch.cli import main


def invoke(*args):
    return CliRunner().invoke(main, list(args))


def test_help_exits_zero():
    res = invoke("--help")
    assert res.exit_code == 0
    for sub in ("encode", "decode", "roundtrip", "gen", "experiment", "calibrate"):
        assert sub in res.output


def test_gen_is_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for prefix in (a, b):
        res = invoke("gen", "--generator", "random_edits", "--n", "64",
                     "--k", "3", "--seed", "9",
                     "--out-x", str(prefix) + "x", "--out-y", str(prefix) + "y")
        assert res.exit_code == 0
    assert open(str(a) + "x").read() == open(str(b) + "x").read()
    assert open(str(a) + "y").read() == open(str(b) + "y").read()


def test_encode_decode_roundtrip(tmp_path):
    fx = tmp_path / "x.txt"
    fy = tmp_path / "y.txt"
    res = invoke("gen", "--generator", "random_edits", "--n", "128", "--k", "3",
                 "--seed", "5", "--out-x", str(fx), "--out-y", str(fy))
    assert res.exit_code == 0

    sx = tmp_path / "x.sk"
    sy = tmp_path / "y.sk"
    for src, dst in ((fx, sx), (fy, sy)):
        res = invoke("encode", "--input", str(src), "--output", str(dst),
                     "--k", "3", "--seed", "77", "--tau", "6")
        assert res.exit_code == 0
        info = json.loads(res.output)
        assert info["tau"] == 6
        assert info["bytes"] == dst.stat().st_size

    res = invoke("decode", "--sketch-x", str(sx), "--sketch-y", str(sy))
    assert res.exit_code == 0
    verdict = json.loads(res.output)
    assert 0 < verdict["distance"] <= 3
    assert len(verdict["script"]) == verdict["distance"]
    for op in verdict["script"]:
        assert op["op"] in ("insert", "delete", "substitute")
        assert (op["op"] == "delete") == ("symbol" not in op)


def test_decode_identical_sketches(tmp_path):
    fx = tmp_path / "x.txt"
    invoke("gen", "--generator", "independent", "--n", "64", "--seed", "3",
           "--out-x", str(fx), "--out-y", str(tmp_path / "ignored.txt"))
    sk = tmp_path / "x.sk"
    invoke("encode", "--input", str(fx), "--output", str(sk), "--k", "2",
           "--tau", "4")
    res = invoke("decode", "--sketch-x", str(sk), "--sketch-y", str(sk))
    assert res.exit_code == 0
    assert json.loads(res.output) == {"distance": 0, "script": []}


def test_decode_error_report_exits_one(tmp_path):
    fx = tmp_path / "x.txt"
    fy = tmp_path / "y.txt"
    invoke("gen", "--generator", "independent", "--n", "256", "--seed", "8",
           "--out-x", str(fx), "--out-y", str(fy))
    sx = tmp_path / "x.sk"
    sy = tmp_path / "y.sk"
    for src, dst in ((fx, sx), (fy, sy)):
        invoke("encode", "--input", str(src), "--output", str(dst),
               "--k", "3", "--seed", "1", "--tau", "4")
    res = invoke("decode", "--sketch-x", str(sx), "--sketch-y", str(sy))
    assert res.exit_code == 1
    assert "error" in json.loads(res.output)


def test_roundtrip_command():
    res = invoke("roundtrip", "--n", "128", "--k", "2", "--trials", "3",
                 "--tau", "4", "--seed", "2")
    assert res.exit_code == 0
    assert json.loads(res.output)["success_rate"] == 1.0


def test_experiment_command(tmp_path):
    out = tmp_path / "rep.json"
    csv = tmp_path / "rep.csv"
    res = invoke("experiment", "gambler_ruin", "--seed", "4",
                 "-p", "a=2", "-p", "b=2", "-p", "trials=100",
                 "--json", str(out), "--csv", str(csv))
    assert res.exit_code == 0
    rep = json.loads(out.read_text())
    assert rep["experiment"] == "gambler_ruin"
    assert rep["trials"] == 100
    header = csv.read_text().splitlines()[0]
    assert "hit_b" in header


def test_experiment_usage_errors():
    assert invoke("experiment", "no_such_thing").exit_code == 2
    assert invoke("experiment", "gambler_ruin", "-p", "bogus").exit_code == 2
    assert invoke("experiment", "gambler_ruin", "-p", "nope=1").exit_code == 2


def test_bad_seed_rejected(tmp_path):
    res = invoke("roundtrip", "--n", "64", "--k", "2", "--trials", "1",
                 "--seed", "xyz")
    assert res.exit_code == 2


def test_hex_seed_accepted():
    res = invoke("experiment", "gambler_ruin", "--seed", "0xBEEF",
                 "-p", "a=2", "-p", "b=2", "-p", "trials=50")
    assert res.exit_code == 0
