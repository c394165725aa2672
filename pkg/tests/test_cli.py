import subprocess
import sys
from fractions import Fraction

import pytest

from ivconform import oracle, rounding
from ivconform.cli import main
from ivconform.formats import BINARY64, get_format
from ivconform.oracle import HPBound
from ivconform.pairgen import read_pairs_with_header


@pytest.fixture
def exp_file(tmp_path):
    path = tmp_path / "exp.pairs"
    assert main(["gen", "--fn", "exp", "--n", "20", "--out", str(path)]) == 0
    return path


@pytest.fixture
def cbrt32_file(tmp_path):
    path = tmp_path / "cbrt32.pairs"
    assert main(["gen", "--fn", "cbrt", "--format", "b32", "--n", "100", "--out", str(path)]) == 0
    return path


def test_gen_writes_file_and_stats(exp_file, capsys):
    pairs, header = read_pairs_with_header(exp_file)
    assert header["function"] == "exp" and header["seed"] == "0"
    assert sum(p.tag.startswith("random") for p in pairs) == 20
    assert main(["gen", "--fn", "exp", "--n", "0", "--out", str(exp_file)]) == 0
    out = capsys.readouterr().out
    assert "oracle: endpoints=" in out and "q_histogram=116:" in out
    pairs, _ = read_pairs_with_header(exp_file)
    assert pairs and all(p.tag.startswith("special") for p in pairs)


def test_gen_to_stdout(capsys):
    assert main(["gen", "--fn", "sqr", "--n", "3", "--no-specials"]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("# ivconform testing pairs\n")
    assert captured.out.count("\nsqr b64 ") == 3
    assert "3 pairs for sqr b64" in captured.err


def test_check_builtin_passes(exp_file, capsys):
    assert main(["check", str(exp_file)]) == 0
    assert "claimed mode: tightest -> upheld" in capsys.readouterr().out


def test_check_naive32_claims(cbrt32_file, capsys):
    assert main(["check", str(cbrt32_file), "--target", "naive32"]) == 1
    out = capsys.readouterr().out
    assert "NOT upheld" in out and "below claim" in out
    assert main(["check", str(cbrt32_file), "--target", "naive32", "--claim", "accurate", "--quiet"]) == 0


def test_check_records(exp_file, tmp_path):
    rec = tmp_path / "out.records"
    assert main(["check", str(exp_file), "--records", str(rec), "--quiet"]) == 0
    lines = rec.read_text().splitlines()
    assert lines[-1].startswith("summary ")
    assert "claim_upheld=true" in lines[-1]
    assert any(line.startswith("range_warning ") for line in lines)  # the [-1e9, 0] special
    assert all(line.split()[0] in ("outcome", "range_warning", "summary") for line in lines)


def test_check_over_adapter_subprocess(cbrt32_file):
    cmd = f"{sys.executable} -m ivconform adapter naive32"
    assert main(["check", str(cbrt32_file), "--adapter", cmd, "--quiet"]) == 1
    assert main(["check", str(cbrt32_file), "--adapter", cmd, "--claim", "accurate", "--quiet", "--workers", "2"]) == 0


def test_exit_code_io_and_parse(tmp_path, exp_file, capsys):
    assert main(["check", str(tmp_path / "nope.pairs")]) == 2
    bad = tmp_path / "bad.pairs"
    bad.write_text("exp b64 [0x1p+0] [0x1p+0,0x1p+0] -\n")
    assert main(["check", str(bad)]) == 2
    truncated = tmp_path / "short.pairs"
    truncated.write_text("".join(exp_file.read_text().splitlines(keepends=True)[:-3]))
    assert main(["check", str(truncated)]) == 2
    assert "announces" in capsys.readouterr().err
    assert main(["gen", "--fn", "exp", "--out", str(tmp_path / "missing" / "x.pairs")]) == 2


def test_usage_errors_exit_2():
    for argv in (["gen", "--fn", "log"], ["check"], ["frobnicate"], ["gen", "--fn", "exp", "--format", "b16"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2


def test_exit_code_adapter(exp_file, tmp_path):
    assert main(["check", str(exp_file), "--adapter", "false"]) == 3
    flaky = tmp_path / "flaky.py"
    flaky.write_text(
        "import sys\n"
        "from ivconform.adapter import BUILTIN, handle_line\n"
        "for line in sys.stdin:\n"
        "    reply = handle_line(BUILTIN, line)\n"
        "    print('RES nonsense' if line.startswith('EVAL') else '\\n'.join(reply), flush=True)\n"
    )
    cmd = f"{sys.executable} {flaky}"
    assert main(["check", str(exp_file), "--adapter", cmd, "--fault-budget", "2", "--quiet"]) == 3


def test_q_max_environment(monkeypatch, tmp_path):
    out = str(tmp_path / "s.pairs")
    monkeypatch.setenv("IVCONFORM_Q_MAX", "lots")
    assert main(["gen", "--fn", "sin", "--n", "1", "--out", out]) == 2
    monkeypatch.setenv("IVCONFORM_Q_MAX", "64")  # below the starting precision
    assert main(["gen", "--fn", "sin", "--n", "1", "--out", out]) == 2
    monkeypatch.setenv("IVCONFORM_Q_MAX", "4096")
    assert main(["gen", "--fn", "sin", "--n", "1", "--out", out]) == 0


def test_precision_exhausted_exit_4(monkeypatch, tmp_path):
    def straddle(f, x, q, cfg=None):
        eps = Fraction(1, 2**q)
        return HPBound(Fraction(1) - eps, Fraction(1) + eps, q)

    monkeypatch.setattr(oracle, "point_enclosure", straddle)
    monkeypatch.setenv("IVCONFORM_Q_MAX", "300")
    assert main(["gen", "--fn", "exp", "--n", "1", "--out", str(tmp_path / "e.pairs")]) == 4


def test_selftest_passes(capsys):
    assert main(["selftest", "--n", "200"]) == 0
    out = capsys.readouterr().out
    assert "range-violation envelopes reproduced" in out
    assert "FAIL" not in out


def test_selftest_catches_off_by_one_next_up(monkeypatch, capsys):
    real = rounding.next_up

    def sabotaged(x, fmt=BINARY64):
        return real(real(x, fmt), fmt)  # one step too far

    monkeypatch.setattr(rounding, "next_up", sabotaged)
    assert main(["selftest", "--n", "50", "--quiet"]) == 1
    summary = capsys.readouterr().out.splitlines()[-1]
    assert "checks failed" in summary and "symmetry" in summary


def test_selftest_catches_flush_to_zero(monkeypatch, capsys):
    real = rounding.next_up

    def ftz(x, fmt=BINARY64):
        r = real(x, fmt)
        return 0.0 if abs(r) < get_format(fmt).min_normal else r

    monkeypatch.setattr(rounding, "next_up", ftz)
    assert main(["selftest", "--n", "50", "--quiet"]) == 1
    out = capsys.readouterr().out
    assert "FAIL exp envelope" in out
    assert "range-violation envelopes reproduced" not in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ivconform", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("ivconform ")
