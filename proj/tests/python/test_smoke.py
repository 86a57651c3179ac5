import json
import zlib
from fractions import Fraction
from pathlib import Path

import pytest

import rbnsize

ROOT = Path(__file__).resolve().parents[2]


def test_encode_decode():
    assert rbnsize.encode("110111") == "100T00T"
    assert rbnsize.encode("110111", ascii=False) == "1001̄001̄"
    assert rbnsize.decode("100T00T") == "110111"
    assert rbnsize.weight("100T00T") == 3
    with pytest.raises(rbnsize.RbnError):
        rbnsize.decode("1T")
    with pytest.raises(ValueError):
        rbnsize.encode("102")


def test_encode_digits_lsb_first():
    assert rbnsize.encode_digits(b"\x07") == [-1, 0, 0, 1, 0, 0, 0, 0, 0]


def test_run_analysis():
    assert rbnsize.run_count_table(8) == [320, 144, 64, 28, 12, 5, 2, 1]
    assert rbnsize.occurrence_count(8, 2, 2)["count"] == 44
    assert rbnsize.formula_total_nonzeros(8) == 640
    assert rbnsize.formula_total_nonzeros(1) == Fraction(3, 2)
    assert rbnsize.measured_total_nonzeros(2) == 4
    assert rbnsize.deviation_csv(16) == (ROOT / "reports" / "nonzero_deviation.csv").read_text()


def test_energy():
    names = [p["name"] for p in rbnsize.profiles()]
    assert names == ["Maxim 2820", "Chipcon CC2510Fx", "RFM TR1000", "Maxim 1479"]
    assert rbnsize.gamma_size("Maxim 2820") == pytest.approx(0.3214, abs=2e-4)
    assert rbnsize.gamma_dev("tr1000", 1024) == pytest.approx(0.7495, abs=2e-4)
    rbn = rbnsize.frame_energy("110111", mode="RBN")
    ebt = rbnsize.frame_energy("110111", mode="EbT")
    assert rbn["energized_symbols"] == 3 and rbn["symbols"] == 7
    assert ebt["total_uj"] == pytest.approx(6 * 2.7 * 70 * 20e-3)


def test_frames():
    f = rbnsize.build_data_frame("broadcast", "00:00:00:00:00:01", b"\xab")
    golden = (ROOT / "data" / "fixtures" / "golden_data_bcast_ab.sym").read_text().strip()
    assert f["symbols"] == golden
    assert f["checksum"] == zlib.crc32(b"\xab")
    parsed = rbnsize.parse_frame(f["symbols"])
    assert parsed["ok"] and parsed["frame"]["payload"] == b"\xab"
    broken = "x" + f["symbols"][1:]
    assert not rbnsize.parse_frame(broken)["ok"]
    rts = rbnsize.build_control_frame("RTS", "00:00:00:00:00:02", "00:00:00:00:00:01", 4)
    assert rts["checksum"] == 0x1C6DFD66
    assert rbnsize.crc32(b"123456789") == 0xCBF43926


def test_corpus():
    t = rbnsize.analyze_bytes(b"\x00" * 128)
    assert t["gamma_size_ideal"] == 1.0 and t["rbn_nonzeros"] == 0
    report = rbnsize.analyze_corpus(str(ROOT / "data" / "minicorpus"))
    assert len(report["files"]) == 4
    assert {s["suite"] for s in report["suites"]} == {"text", "source", "generated"}
    with pytest.raises(OSError):
        rbnsize.analyze_corpus(str(ROOT / "no-such-dir"))


def test_simulate():
    out = rbnsize.simulate_file(ROOT / "data" / "scenarios" / "single_exchange.json", trace=True)
    assert out["metrics"]["delivered"] == 1
    assert " tx_start " in out["trace"]
    again = rbnsize.simulate_file(ROOT / "data" / "scenarios" / "single_exchange.json", trace=True)
    assert again == out
    short = rbnsize.simulate_file(ROOT / "data" / "scenarios" / "wait_b_short.json")
    assert short["metrics"]["crc_failures"] == 1
    with pytest.raises(rbnsize.ScenarioError):
        rbnsize.simulate_dict({"schema_version": 1, "duration_us": 1, "nodes": []})
