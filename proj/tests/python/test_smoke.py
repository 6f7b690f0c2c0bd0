import json
import os
import subprocess

import pytest

import maldist


def test_sets():
    evens = maldist.Set("(ap 0 2)")
    assert 4 in evens and 5 not in evens
    assert evens.count_upto(10) == 6
    assert evens.density() == "1/2"
    with pytest.raises(maldist.ParseError):
        maldist.Set("(ap 0")


def test_upper_density_of_the_evens():
    v = maldist.eval_phi(maldist.Lscsm("upper-density"), maldist.Set("(ap 0 2)"), 1000)
    assert v["exact"]
    assert v["upper"] == "1"


def test_gaps_and_witnesses():
    w = maldist.gap_to_intervals(maldist.Gap("(affine 1 1)"))
    assert w.prefix(3) == [(0, 1), (2, 5), (6, 13)]
    g = maldist.gap_from_lscsm(maldist.Lscsm("upper-density"), "1/2")
    assert [g(n) for n in range(5)] == [0, 0, 6, 13, 20]
    r = maldist.check_condition2(maldist.Gap("(const 0)"), maldist.Set("(ap 0 2)"), 100)
    assert r["fails_infinitely_often"] is True


def test_cli_in_process():
    status, out, _ = maldist.run_cli(["galpha", "--phi", "upper-density", "--alpha", "1/2", "--n", "2"])
    assert status == 0 and out == "6\n"
    status, _, err = maldist.run_cli(["galpha", "--bogus"])
    assert status == 2 and "Grammar reference" in err


@pytest.mark.skipif("MALDIST_CLI" not in os.environ, reason="CLI path not given")
def test_cli_binary_reports():
    args = [os.environ["MALDIST_CLI"], "bm-play", "--eta", "(1/2)", "--rounds", "4",
            "--adversary", "(random 3)", "--json"]
    a = subprocess.run(args, capture_output=True, check=True).stdout
    b = subprocess.run(args, capture_output=True, check=True).stdout
    assert a == b
    assert json.loads(a)["command"] == "bm-play"
