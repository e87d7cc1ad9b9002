from fractions import Fraction

import pytest

import adcs


def test_rmc_counts_a_triangle():
    r = adcs.run(protocol="rmc", n=3, schedule="static-clique")
    assert r.ok
    assert r.summary["outputs"] == [3, 3, 3]
    assert [step["k"] for step in r.summary["estimate_path"]] == [2, 4, 3]


def test_all_to_all_two_nodes():
    r = adcs.run({"protocol": "all2all", "n": 2, "messages": ["0", "1"]})
    assert r.ok
    assert r.summary["outputs"] == [{"0": 1, "1": 1}, {"0": 1, "1": 1}]


def test_multiplicity_on_a_path():
    r = adcs.run(protocol="multiplicity", n=4, schedule="static-path", delta=1)
    assert r.ok
    assert r.summary["outputs"] == [1, 1, 1, 1]


def test_failures_become_exit_codes():
    assert adcs.run(protocol="rmc", n=3, ell=3).status == "infeasible"
    assert adcs.run(protocol="rmc", n=3, round_cap=10).status == "round_cap"
    bad = adcs.run(protocol="rmc", colour="blue")
    assert bad.status == "config_error"
    assert "colour" in bad.diagnostic


def test_exact_helpers():
    assert adcs.isoperimetric_number(4, [(0, 1), (1, 2), (2, 3)]) == "1/2"
    assert adcs.conductance(2, [(0, 1)], 4) == "1/4"
    assert adcs.share_matrix(2, [(0, 1)], 4) == [["3/4", "1/4"], ["1/4", "3/4"]]
    assert adcs.truncate_share("3", 2, 2) == "1"
    assert adcs.broadcast_rounds(4, 1, "1") == 2


def test_parameters():
    p = adcs.rmc_params(2, 1, 1)
    assert p["d"] == 8
    assert Fraction(p["tau"]) == Fraction(3, 4)
    m = adcs.mult_params(2, 1)
    assert (m["d"], m["alpha"], m["c"]) == (4, 3, 21)
    with pytest.raises(adcs.InfeasibleParameterError):
        adcs.rmc_params(1, 1, 1)


def test_sweep_with_no_cells():
    report, code = adcs.sweep({"base": {"n": 3}})
    assert code == 0
    assert report["cells"] == 0


def test_exception_hierarchy():
    assert issubclass(adcs.ConfigError, adcs.Error)
    assert issubclass(adcs.InfeasibleParameterError, adcs.Error)
