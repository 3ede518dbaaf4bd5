import csv
import io
import json
import math

import numpy as np
import pytest

from twobytwo.cli import main
from twobytwo.measures import big_i_lambda, i_lambda


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def ok(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return out


def write_transactions(path, seed, n_records=5000, n_items=20, rate=0.02, planted=False):
    rng = np.random.default_rng(seed)
    a = rng.uniform(size=(n_records, n_items)) < rate
    b = rng.uniform(size=(n_records, n_items)) < rate
    if planted:
        # e0 reported exactly when d0 is: n11 = #d0 = #e0, so n11 / E11 = n_records / #d0
        b[:, 0] = a[:, 0]
    lines = []
    for i in range(n_records):
        drugs = ";".join(f"d{j}" for j in np.flatnonzero(a[i]))
        events = ";".join(f"e{j}" for j in np.flatnonzero(b[i]))
        lines.append(f"r{i}\t{drugs}\t{events}")
    path.write_text("\n".join(lines) + "\n")
    return path


class TestMeasures:
    def test_uniform(self, capsys):
        (rec,) = rows(ok(capsys, "measures", "--probs", "0.25,0.25,0.25,0.25"))
        assert float(rec["odds_ratio"]) == 1
        for key in ("yule_y", "yule_q", "lewontin_d_prime", "binary_r", "pmi", "mi", "nmi", "rrr", "prr"):
            assert float(rec[key]) == pytest.approx(float(key in ("rrr", "prr")), abs=1e-12), key

    def test_smallpox(self, capsys):
        (rec,) = rows(ok(capsys, "measures", "--probs", "0.840,0.043,0.059,0.058", "--log-base", "2"))
        assert float(rec["yule_y"]) == pytest.approx(0.630, abs=0.002)
        assert float(rec["pmi"]) == pytest.approx(2.300, abs=0.01)
        assert float(rec["mi"]) == pytest.approx(0.108, abs=0.005)
        assert rec["pmi_cell"] == "11"

    def test_anti_diagonal_counts(self, capsys):
        (rec,) = rows(ok(capsys, "measures", "--counts", "0,5,5,0"))
        assert rec["odds_ratio"] == "0"
        assert float(rec["yule_y"]) == -1

    def test_diagonal_renders_inf(self, capsys):
        (rec,) = rows(ok(capsys, "measures", "--probs", "0.5,0,0,0.5"))
        assert rec["odds_ratio"] == "inf"
        assert float(rec["yule_y"]) == 1

    def test_undefined_is_na(self, capsys):
        (rec,) = rows(ok(capsys, "measures", "--counts", "5,5,0,0"))
        assert rec["odds_ratio"].startswith("NA:")
        assert rec["binary_r"].startswith("NA:")

    def test_continuity_correction(self, capsys):
        (rec,) = rows(ok(capsys, "measures", "--counts", "0,5,5,0", "--cc", "0.5"))
        assert float(rec["odds_ratio"]) == pytest.approx(0.5**2 / 5.5**2, rel=1e-5)

    def test_log_base_e(self, capsys):
        (b2,) = rows(ok(capsys, "measures", "--probs", "0.4,0.1,0.1,0.4"))
        (be,) = rows(ok(capsys, "measures", "--probs", "0.4,0.1,0.1,0.4", "--log-base", "e"))
        assert float(be["mi"]) == pytest.approx(float(b2["mi"]) * math.log(2), rel=1e-5)

    @pytest.mark.parametrize(
        "argv",
        [
            ["measures"],
            ["measures", "--probs", "0.5,0.5"],
            ["measures", "--probs", "a,b,c,d"],
            ["measures", "--probs", "1,1,1,1", "--counts", "1,1,1,1"],
            ["measures", "--probs", "1,1,1,1", "--log-base", "3"],
            ["measures", "--probs", "0.25,0.25,0.25,0.25", "--cc", "0.5"],
            ["measures", "--counts", "1.5,1,1,1"],
            ["nonsense"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 1
        assert out == "" and "error" in err

    def test_negative_is_data_error(self, capsys):
        code, _, err = run(capsys, "measures", "--probs", "0.5,-0.1,0.3,0.3")
        assert code == 2 and "NegativeEntry" in err


class TestCanonical:
    def test_smallpox(self, capsys):
        (rec,) = rows(ok(capsys, "canonical", "--probs", "0.840,0.043,0.059,0.058"))
        # reference has 3 decimals; the exact canonical diagonal is 0.40710
        assert float(rec["p00"]) == pytest.approx(0.408, abs=1e-3)
        assert float(rec["p01"]) == pytest.approx(0.092, abs=1e-3)
        assert float(rec["pmi"]) == pytest.approx(0.705, abs=0.01)
        assert float(rec["mi"]) == pytest.approx(0.310, abs=0.005)

    def test_uniform(self, capsys):
        (rec,) = rows(ok(capsys, "canonical", "--probs", "1,1,1,1"))
        assert [float(rec[k]) for k in ("p00", "p01", "p10", "p11")] == [0.25] * 4

    def test_degenerate(self, capsys):
        code, out, err = run(capsys, "canonical", "--probs", "0.5,0,0,0.5")
        assert code == 2
        assert "DegenerateTable" in err and out == ""


class TestSweep:
    def test_grid(self, capsys):
        recs = rows(ok(capsys, "sweep", "--lambda-min", "1", "--lambda-max", "1e6", "--points", "61"))
        assert list(recs[0]) == ["lambda", "Y", "i_lambda", "I_lambda"]
        assert len(recs) == 61
        assert [float(recs[0][k]) for k in ("Y", "i_lambda", "I_lambda")] == [0, 0, 0]
        last = recs[-1]
        assert float(last["lambda"]) == 1e6
        assert float(last["Y"]) == pytest.approx(1, abs=0.01)
        assert float(last["i_lambda"]) == pytest.approx(1, abs=0.01)
        # 50-digit evaluation of the canonical-table MI; still 0.0114 short of 1 here
        assert float(last["I_lambda"]) == pytest.approx(0.988602197369888, abs=1e-6)

    def test_lambda_16(self, capsys):
        recs = rows(ok(capsys, "sweep", "--lambda-min", "16", "--lambda-max", "16", "--points", "2"))
        assert recs[0] == recs[1]
        rec = recs[0]
        assert float(rec["i_lambda"]) == pytest.approx(0.678, abs=0.0005)

    def test_digits(self, capsys):
        (rec, _) = rows(ok(capsys, "sweep", "--lambda-min", "16", "--lambda-max", "20", "--points", "2", "--digits", "12"))
        assert float(rec["i_lambda"]) == pytest.approx(i_lambda(16), abs=1e-11)
        assert float(rec["I_lambda"]) == pytest.approx(big_i_lambda(16), abs=1e-11)

    @pytest.mark.parametrize(
        "argv", [["--lambda-min", "0"], ["--lambda-min", "10", "--lambda-max", "2"], ["--points", "1"]]
    )
    def test_usage(self, capsys, argv):
        assert run(capsys, "sweep", *argv)[0] == 1


class TestEstimate:
    argv = ("estimate", "--counts", "840,43,59,58", "--measure", "yule_y", "--draws", "100000", "--seed", "7")

    def test_smallpox(self, capsys):
        (rec,) = rows(ok(capsys, *self.argv))
        assert float(rec["point"]) == pytest.approx(0.630, abs=0.02)
        assert float(rec["lower"]) < float(rec["point"]) < float(rec["upper"])

    def test_repeatable(self, capsys):
        assert ok(capsys, *self.argv) == ok(capsys, *self.argv)

    @pytest.mark.parametrize("extra", [["--level", "1.5"], ["--prior", "1,2"], ["--measure", "chi2"]])
    def test_usage(self, capsys, extra):
        assert run(capsys, "estimate", "--counts", "1,1,1,1", *extra)[0] == 1

    def test_too_few_draws_is_data_error(self, capsys):
        assert run(capsys, "estimate", "--counts", "1,1,1,1", "--draws", "10")[0] == 2


class TestScreen:
    def test_smallpox_row(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("id,n11,n10,n01,n00\nsmallpox,58,59,43,840\n")
        (rec,) = rows(ok(capsys, "screen", "--tables", str(path)))
        assert list(rec) == ["pair", "n11", "E11", "raw_log2_rrr", "eb_log2", "prr", "yule_y", "pmi_max", "flags"]
        assert rec["pair"] == "smallpox" and rec["n11"] == "58"
        assert float(rec["yule_y"]) == pytest.approx(0.630, abs=0.002)
        assert float(rec["E11"]) == pytest.approx(11.817)

    def test_degenerate_rows_keep_exit_zero(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("id,n11,n10,n01,n00\nz,0,0,0,0\nok,5,10,10,975\n")
        recs = rows(ok(capsys, "screen", "--tables", str(path)))
        assert [r["pair"] for r in recs] == ["ok", "z"]
        assert recs[1]["eb_log2"] == "NA:degenerate_margin"
        assert "empty_table" in recs[1]["flags"]

    def test_negative_count_names_line(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("id,n11,n10,n01,n00\nok,1,1,1,1\nbad,-1,0,0,0\n")
        code, out, err = run(capsys, "screen", "--tables", str(path))
        assert code == 2 and "line 3" in err and out == ""

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "screen", "--tables", str(tmp_path / "none.csv"))[0] == 2

    def test_fit_needs_ten_pairs(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("id,n11,n10,n01,n00\nok,5,10,10,975\n")
        code, _, err = run(capsys, "screen", "--tables", str(path), "--fit")
        assert code == 2 and "TooFewPairs" in err

    def test_planted_pair_first(self, capsys, tmp_path):
        path = write_transactions(tmp_path / "tx.tsv", seed=3, planted=True)
        for prior in (["--fit"], []):
            recs = rows(ok(capsys, "screen", "--transactions", str(path), *prior, "--top", "5"))
            top = recs[0]
            assert top["pair"] == "d0|e0"
            assert float(top["raw_log2_rrr"]) == pytest.approx(math.log2(50), abs=0.5)
            assert float(top["eb_log2"]) > 4

    def test_independent_top_below_one_bit(self, capsys, tmp_path):
        path = write_transactions(tmp_path / "tx.tsv", seed=4)
        recs = rows(ok(capsys, "screen", "--transactions", str(path), "--fit"))
        assert len(recs) > 300
        assert max(float(r["eb_log2"]) for r in recs) < 1

    def test_export_round_trip(self, capsys, tmp_path):
        path = write_transactions(tmp_path / "tx.tsv", seed=5, n_records=500, n_items=5, rate=0.1)
        export = tmp_path / "pairs.csv"
        from_tx = ok(capsys, "screen", "--transactions", str(path), "--export-tables", str(export))
        assert ok(capsys, "screen", "--tables", str(export)) == from_tx

    def test_min_n11(self, capsys, tmp_path):
        path = write_transactions(tmp_path / "tx.tsv", seed=5, n_records=500, n_items=5, rate=0.1)
        recs = rows(ok(capsys, "screen", "--transactions", str(path), "--min-n11", "8"))
        assert recs and all(int(r["n11"]) >= 8 for r in recs)

    def test_deterministic(self, capsys, tmp_path):
        path = write_transactions(tmp_path / "tx.tsv", seed=6, n_records=2000, n_items=8, rate=0.05)
        argv = ("screen", "--transactions", str(path), "--fit", "--seed", "2", "--restarts", "2")
        assert ok(capsys, *argv) == ok(capsys, *argv)


class TestFormats:
    @pytest.mark.parametrize(
        "argv",
        [
            ("measures", "--probs", "0.840,0.043,0.059,0.058"),
            ("measures", "--counts", "5,5,0,0"),
            ("measures", "--probs", "0.5,0,0,0.5"),
            ("canonical", "--probs", "1,2,3,4"),
            ("sweep", "--points", "7"),
            ("estimate", "--counts", "10,2,3,9", "--draws", "2000"),
        ],
    )
    def test_json_matches_csv(self, capsys, argv):
        csv_recs = rows(ok(capsys, *argv, "--format", "csv"))
        doc = json.loads(ok(capsys, *argv, "--format", "json"))
        assert doc["schema_version"] == 1
        assert doc["kind"] == argv[0]
        assert len(doc["records"]) == len(csv_recs)
        for c, j in zip(csv_recs, doc["records"]):
            for key, text in c.items():
                value = j[key]
                if text.startswith("NA:"):
                    assert value is None and j[f"{key}_reason"] == text[3:]
                elif text in ("inf", "-inf", "nan"):
                    assert value == text
                elif isinstance(value, float):
                    assert value == float(text)
                else:
                    assert str(value) == text

    def test_json_screen(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("id,n11,n10,n01,n00\nz,0,3,0,4\nok,5,10,10,975\n")
        doc = json.loads(ok(capsys, "screen", "--tables", str(path), "--format", "json"))
        z = doc["records"][1]
        assert z["pair"] == "z"
        assert z["raw_log2_rrr"] is None and z["raw_log2_rrr_reason"] == "degenerate_margin"

    def test_lf_line_endings(self, capsys):
        out = ok(capsys, "sweep", "--points", "3")
        assert "\r" not in out and out.endswith("\n")
