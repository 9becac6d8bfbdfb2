import csv
import io
import json
import subprocess
import sys

import pytest

from padic_cf.cli import load_config, parse_range, run


def invoke(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = run([*argv, "--out", str(out)])
    return code, out.read_bytes() if out.exists() else b""


def rows_of(data: bytes):
    return list(csv.DictReader(io.StringIO(data.decode("utf-8"))))


def test_no_arguments_is_usage_error(capsys):
    assert run([]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand(capsys):
    assert run(["frobnicate"]) == 2


def test_hankel_table(tmp_path):
    code, data = invoke(tmp_path, "hankel", "--range", "1..12", "--no-timestamp")
    assert code == 0
    got = {int(r["j"]): int(r["H"]) for r in rows_of(data)}
    assert got == {1: 1, 2: -2, 3: 0, 4: 0, 5: 0, 6: 0, 7: 64, 8: 128, 9: -64, 10: -56, 11: -14, 12: 1}
    assert data.startswith(b"j,H\r\n")


def test_header_only_csv(tmp_path):
    code, data = invoke(tmp_path, "cf-table", "--classify", "--m-range", "1..2", "--no-timestamp")
    assert code == 0
    assert data == b"m,j,r,conv_den,eta,class\r\n"


def test_pq_row_json_round_trip(tmp_path):
    code, data = invoke(tmp_path, "cf-table", "--m-range", "12..12", "--format", "json", "--no-timestamp")
    doc = json.loads(data)
    assert code == 0 and doc["passed"] is True
    row = next(r for r in doc["rows"] if r["conv_den"] == "5")
    assert int(row["r"]) == 659 and row["class"] == "unclassified"
    assert doc["columns"] == ["m", "j", "r", "conv_den", "eta", "class"]
    assert "timestamp" not in doc


def test_eta_six_decimals(tmp_path):
    _, data = invoke(tmp_path, "cf-table", "--m-range", "12..12", "--no-timestamp")
    etas = [r["eta"] for r in rows_of(data)]
    assert all(len(e.split(".")[1]) == 6 for e in etas)
    assert "0.492343" in etas


def test_big_integers_are_exact_in_json(tmp_path):
    _, data = invoke(tmp_path, "families", "--k-range", "6..6", "--format", "json", "--no-timestamp")
    row = json.loads(data)["rows"][0]
    assert int(row["b"]) == 1 + 3 ** 64


def test_byte_identical_reruns(tmp_path):
    argv = ("exponents", "--m-max", "60", "--no-timestamp", "--format", "json")
    _, a = invoke(tmp_path, *argv)
    _, b = invoke(tmp_path, *argv)
    assert a == b


def test_timestamp_present_by_default(tmp_path):
    _, data = invoke(tmp_path, "hankel", "--range", "1..2", "--format", "json")
    assert "timestamp" in json.loads(data)


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("# sweep\np = 5\nm-range = 10..11\nlargest = true\n", encoding="utf-8")
    _, data = invoke(tmp_path, "cf-table", "--config", str(cfg), "--no-timestamp", "--format", "json")
    doc = json.loads(data)
    assert doc["config"]["p"] == "5" and doc["config"]["largest"] is True
    assert [r["m"] for r in doc["rows"]] == ["10", "11"]
    _, data = invoke(tmp_path, "cf-table", "--config", str(cfg), "--p", "7", "--no-timestamp",
                     "--format", "json", name="o")
    assert json.loads(data)["config"]["p"] == "7"


@pytest.mark.parametrize("body", ["p = 4\n", "nonsense = 1\n", "just a line\n", "m-range = 5..1\n"])
def test_bad_config_exits_2(tmp_path, body, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(body, encoding="utf-8")
    assert run(["cf-table", "--config", str(cfg), "--no-timestamp"]) == 2


def test_missing_config_exits_2(tmp_path):
    assert run(["cf-table", "--config", str(tmp_path / "nope.cfg")]) == 2


@pytest.mark.parametrize("argv", [
    ["cf-table", "--p", "4"],
    ["exponents", "--p", "1"],
    ["cf-table", "--m-range", "9..3"],
    ["pade", "--ladder", "--p", "6"],
    ["hankel", "--series", "bogus:1"],
    ["cf-table", "--jobs", "0"],
    ["families", "--which", "fib", "--k-range", "2..3"],
])
def test_bad_arguments_exit_2(argv, capsys):
    assert run(argv + ["--no-timestamp"]) == 2
    assert capsys.readouterr().err


def test_parse_range_and_config_loader(tmp_path):
    assert parse_range("3..7") == (3, 7) and parse_range("4") == (4, 4)
    cfg = tmp_path / "c"
    cfg.write_text("a-b = 1  # c\n\nc=x\n", encoding="utf-8")
    assert load_config(str(cfg)) == {"a_b": "1", "c": "x"}


def test_pade_and_ladder(tmp_path):
    code, data = invoke(tmp_path, "pade", "--u", "6", "--v", "7", "--no-timestamp", "--format", "json")
    doc = json.loads(data)
    assert code == 0 and doc["rows"][0]["order"] == "14"
    code, data = invoke(tmp_path, "pade", "--ladder", "--m", "2", "--no-timestamp", name="l")
    assert code == 0 and [r["j"] for r in rows_of(data)] == ["7", "8", "9", "10", "11"]


def test_families_and_words(tmp_path):
    code, data = invoke(tmp_path, "families", "--which", "fib", "--k-range", "5..6", "--p", "2", "--no-timestamp")
    assert code == 0 and {r["tag"] for r in rows_of(data)} == {"fib-r", "fib-x"}
    code, data = invoke(tmp_path, "words", "dump", "--seq", "fib", "--n", "5", "--no-timestamp", name="w")
    assert [r["letter"] for r in rows_of(data)] == ["0", "1", "0", "0", "1"]
    code, data = invoke(tmp_path, "words", "blocks", "--n-hi", "4", "--no-timestamp", name="b")
    assert code == 0


def test_conjecture_report_never_fails(tmp_path):
    code, data = invoke(tmp_path, "families", "--which", "conjecture", "--m-max", "100",
                        "--format", "json", "--no-timestamp")
    doc = json.loads(data)
    assert code == 0 and doc["assertions"] == [] and int(doc["summary"]["samples"]) == len(doc["rows"])


def test_search_bounded(tmp_path):
    code, data = invoke(tmp_path, "search-bounded", "--base", "3", "--cap", "4", "--depth", "12",
                        "--format", "json", "--no-timestamp")
    doc = json.loads(data)
    assert code == 0 and 1 <= int(doc["summary"]["best_depth"]) <= 12
    assert [r["depth"] for r in doc["rows"]] == [str(d) for d in range(1, len(doc["rows"]) + 1)]


def test_verify_only_exit_codes(tmp_path):
    code, data = invoke(tmp_path, "verify", "--only", "1,2", "--quiet", "--no-timestamp")
    assert code == 0 and [r["pass"] for r in rows_of(data)] == ["true", "true"]
    # the large-quotient size test misses its p^2 window for p = 2, 3
    code, data = invoke(tmp_path, "verify", "--only", "4", "--quiet", "--no-timestamp", name="four")
    assert code == 1 and rows_of(data)[0]["pass"] == "false"
    assert run(["verify", "--only", "x", "--quiet"]) == 2
    assert run(["verify", "--p", "9", "--quiet"]) == 2


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "padic_cf.cli", "hankel", "--range", "1..2", "--no-timestamp"],
                          capture_output=True, check=False)
    assert proc.returncode == 0 and proc.stdout == b"j,H\r\n1,1\r\n2,-2\r\n"
