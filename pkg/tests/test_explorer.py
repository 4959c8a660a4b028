import numpy
import pytest

import cantileverq
from cantileverq.errors import MissingModeConstantError, MissingThermalDataError

PRESSURES = numpy.geomspace(35.0, 101200.0, 41)


@pytest.fixture
def pressure_sweep(calibrated_point):
    return cantileverq.SweepSpec("pressure", PRESSURES, calibrated_point)


def test_pressure_sweep(pressure_sweep):
    rows = cantileverq.run_sweep(pressure_sweep)
    assert len(rows) == len(PRESSURES)
    assert all(r.ok for r in rows)
    assert [r.value for r in rows] == pytest.approx(list(PRESSURES))

    q = numpy.array([r.budget.q_total for r in rows])
    assert numpy.all(numpy.diff(q) < 0)
    assert rows[0].budget.regime is cantileverq.Regime.TRANSITION
    assert rows[-1].budget.regime is cantileverq.Regime.VISCOUS
    # air damping dominates at atmosphere
    assert rows[-1].budget.q_ted > 10 * rows[-1].budget.q_air


def test_sweep_single_points(pressure_sweep, calibrated_point):
    rows = cantileverq.run_sweep(pressure_sweep)
    for i in (0, 17, 40):
        single = cantileverq.SweepSpec("pressure", [PRESSURES[i]], calibrated_point)
        (row,) = cantileverq.run_sweep(single)
        assert row.budget.q_total == rows[i].budget.q_total


def test_sweep_workers(pressure_sweep):
    serial = cantileverq.run_sweep(pressure_sweep)
    threaded = cantileverq.run_sweep(pressure_sweep, workers=4)
    assert [r.to_dict() for r in threaded] == [r.to_dict() for r in serial]


@pytest.mark.parametrize(
    "axis,values",
    [("length", [50e-6, 100e-6, 200e-6]), ("width", [10e-6, 30e-6, 60e-6])],
)
def test_geometry_sweep(calibrated_point, axis, values):
    spec = cantileverq.SweepSpec(axis, values, calibrated_point)
    rows = cantileverq.run_sweep(spec)
    assert all(r.ok for r in rows)
    f = [r.budget.resonant_frequency for r in rows]
    if axis == "length":
        assert f[0] > f[1] > f[2]
    else:
        assert f == pytest.approx([f[0]] * 3)


def test_failed_rows(calibrated_point, bare_silicon):
    spec = cantileverq.SweepSpec(
        "pressure", [35.0, 101200.0], calibrated_point.replace(material=bare_silicon)
    )
    rows = cantileverq.run_sweep(spec)
    assert len(rows) == 2
    for r in rows:
        assert not r.ok
        assert r.budget is None
        assert "thermal" in r.error.lower()
        record = r.to_dict()
        assert record["q_total"] is None
        assert record["error"] == r.error


def test_series(pressure_sweep):
    lengths = [100e-6, 150e-6, 200e-6]
    rows = cantileverq.run_sweep_series(pressure_sweep, "length", lengths)
    assert len(rows) == 3 * len(PRESSURES)

    record = rows[0].to_dict()
    assert list(record)[:3] == ["length", "pressure", "resonant_frequency"]
    assert list(record)[-1] == "error"

    # longer beams lose less to air and support at low pressure
    low = [r.budget.q_total for r in rows if r.value == PRESSURES[0]]
    assert low[0] < low[1] < low[2]
    assert [r.series[1] for r in rows[:: len(PRESSURES)]] == lengths

    with pytest.raises(ValueError):
        cantileverq.run_sweep_series(pressure_sweep, "pressure", [1.0])


@pytest.mark.parametrize(
    "axis,values,error",
    [
        ("pressure", [], ValueError),
        ("pressure", [100.0, 10.0], ValueError),
        ("pressure", [10.0, 10.0], ValueError),
        ("mode", [1.5], ValueError),
        ("mode", [0], ValueError),
        ("mode", [1, 4], MissingModeConstantError),
        ("temperature", [300.0], ValueError),
    ],
)
def test_sweep_spec_invalid(calibrated_point, axis, values, error):
    with pytest.raises(error):
        cantileverq.SweepSpec(axis, values, calibrated_point)


def test_sweep_spec_fixed():
    with pytest.raises(TypeError):
        cantileverq.SweepSpec("pressure", [1.0], None)


def test_operating_point(short_beam, silicon, atmosphere):
    point = cantileverq.OperatingPoint(short_beam, silicon, atmosphere, 1)
    assert point.mode.index == 1
    assert point.sphere == cantileverq.SphereModel()
    assert point.q_others is None

    other = point.replace(q_others=5000.0)
    assert other.evaluate().q_others == 5000.0
    assert point.q_others is None
    assert other.evaluate().q_total < point.evaluate().q_total

    with pytest.raises(TypeError):
        cantileverq.OperatingPoint(short_beam, "silicon", atmosphere, 1)
    with pytest.raises(ValueError):
        point.replace(q_others=-1.0)


@pytest.fixture
def wide_beam():
    return cantileverq.Geometry(300e-6, 50e-6, 5e-6)


@pytest.fixture
def mode_constants():
    return {1: 2.081, 2: 1.0, 3: 0.5}


def test_mode_sweep(wide_beam, silicon, atmosphere, mode_constants):
    rows = cantileverq.mode_sweep(
        wide_beam, silicon, atmosphere, [1, 2, 3], mode_constants
    )
    assert [r.mode for r in rows] == [1, 2, 3]
    q = [r.budget.q_total for r in rows]
    assert q[0] < q[1] < q[2]
    assert q[0] == pytest.approx(2327.0, rel=2e-2)

    f = [r.budget.resonant_frequency for r in rows]
    assert f[1] / f[0] == pytest.approx((4.6940911330 / 1.8751040687) ** 2)

    assert rows[0].nodes == []
    assert rows[1].nodes == pytest.approx([0.7834], abs=1e-4)
    assert rows[2].nodes == pytest.approx([0.5036, 0.8677], abs=1e-4)
    assert rows[0].actuation_displacement is None

    record = rows[1].to_dict()
    assert list(record)[0] == "mode"
    assert list(record)[-2:] == ["nodes", "actuation_displacement"]


def test_mode_sweep_actuation(wide_beam, silicon, atmosphere, mode_constants):
    rows = cantileverq.mode_sweep(
        wide_beam,
        silicon,
        atmosphere,
        [1, 2, 3],
        mode_constants,
        actuation_position=0.7834,
    )
    # actuating at the node of mode 2 barely drives it
    assert abs(rows[1].actuation_displacement) < 1e-3
    assert abs(rows[0].actuation_displacement) > 0.1
    assert abs(rows[2].actuation_displacement) > 0.1


def test_mode_sweep_series(wide_beam, silicon, atmosphere, mode_constants):
    lengths = [300e-6, 400e-6, 500e-6]
    rows = cantileverq.mode_sweep_series(
        wide_beam, silicon, atmosphere, [1, 2, 3], mode_constants, "length", lengths
    )
    assert len(rows) == 9
    assert [r.mode for r in rows] == [1, 2, 3] * 3

    third = []
    for i, length in enumerate(lengths):
        series = rows[3 * i : 3 * (i + 1)]
        assert all(r.series == (cantileverq.SweepAxis.LENGTH, length) for r in series)
        q = [r.budget.q_total for r in series]
        assert q[0] < q[1] < q[2]
        third.append(q[2])
    # longer beams favor the higher modes
    assert third[0] < third[1] < third[2]
    assert rows[2].budget.q_total == pytest.approx(7216.0, rel=2e-2)
    assert rows[8].budget.q_total == pytest.approx(9425.0, rel=2e-2)

    record = rows[4].to_dict()
    assert list(record)[:2] == ["length", "mode"]
    assert record["length"] == 400e-6


def test_mode_sweep_series_by_mode(wide_beam, silicon, atmosphere, mode_constants):
    with pytest.raises(ValueError):
        cantileverq.mode_sweep_series(
            wide_beam, silicon, atmosphere, [1, 2], mode_constants, "mode", [1]
        )


def test_mode_sweep_missing_constant(wide_beam, silicon, atmosphere):
    with pytest.raises(MissingModeConstantError):
        cantileverq.mode_sweep(wide_beam, silicon, atmosphere, [1, 2], {1: 2.081})


def test_mode_sweep_missing_thermal(wide_beam, bare_silicon, atmosphere):
    with pytest.raises(MissingThermalDataError):
        cantileverq.mode_sweep(wide_beam, bare_silicon, atmosphere, [1], {1: 2.081})
