from fractions import Fraction
from pathlib import Path

import pytest

import raccess

SYSTEMS = Path(__file__).resolve().parents[2] / "systems"


def test_coil_index():
    coil = raccess.load(SYSTEMS / "coil.sys")
    assert coil.states == ["x1", "x2"]
    report = raccess.analyze(coil)
    assert report["kappa"]["index"] == 3
    assert report["kappa"]["history"][0]["generators"] == ["x1*(x1 + T*x2)"]
    assert report["singular_points"] == [("0", "0")]


def test_point_status_lag():
    lag = raccess.load(SYSTEMS / "lag.sys")
    assert raccess.point_status(lag, [0, 1], 4)["in_S_k"]
    assert not raccess.point_status(lag, [0, 1], 5)["in_S_k"]
    assert raccess.jacobian_rank(lag, [0, 1], 5)["rank"] == 2


def test_simulate_and_binding():
    lag = raccess.load(SYSTEMS / "lag.sys")
    assert raccess.simulate(lag, [0, 1], [[0.3], [-2.0], [7.0]]) == [[0, 1], [1, 1], [1, 0], [0, -1]]
    coil = raccess.load(SYSTEMS / "coil.sys", T=Fraction(1, 10), a=2, b="1/2")
    assert raccess.jacobian_rank(coil, [0.5, 0.5], 2)["rank"] == 2


def test_remark2_and_round_trip():
    r2 = raccess.load(SYSTEMS / "drift.sys")
    assert raccess.submersive(r2)
    assert not raccess.generically_accessible(r2)
    again = raccess.System.from_text(r2.to_text())
    assert again.to_text() == r2.to_text()


def test_errors():
    with pytest.raises(raccess.ParseError):
        raccess.System.from_text("system s\nstates x\ninputs u\nx' = x + y\n")
    ratio = raccess.load(SYSTEMS / "ratio.sys")
    with pytest.raises(raccess.PoleError):
        raccess.simulate(ratio, [1, 0], [[-1.0]])
    with pytest.raises(TypeError):
        raccess.point_status(ratio, [0.5, 1], 2)


def test_cli_entry_point():
    code, out, _ = raccess.run("check", SYSTEMS / "drift.sys")
    assert code == 0
    assert "not generically accessible; singular everywhere" in out
