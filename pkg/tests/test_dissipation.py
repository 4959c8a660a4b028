import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cantileverq
from cantileverq.dissipation import KNUDSEN_MOLECULAR, KNUDSEN_VISCOUS
from cantileverq.errors import (
    EmptyChannelListError,
    MissingModeConstantError,
    MissingThermalDataError,
    ZeroPressureError,
)
from cantileverq.gas import boltzmann_constant

# hypothesis does not reset function-scoped fixtures between examples
SILICON = cantileverq.Material(
    "silicon",
    youngs_modulus=169e9,
    density=2330.0,
    thermal_expansion=2.6e-6,
    heat_capacity_volumetric=1.631e6,
    thermal_conductivity=148.0,
)
MODE = cantileverq.ModeSpec(1, support_loss_constant=2.081)
SPHERE = cantileverq.SphereModel()


def _air(pressure, temperature=300.0):
    return cantileverq.GasEnvironment(pressure, temperature, 1.85e-5, 0.028964)


lengths = st.floats(min_value=50e-6, max_value=1e-3)
pressures = st.floats(min_value=1e-2, max_value=2e5)
temperatures = st.floats(min_value=200.0, max_value=400.0)
qualities = st.floats(min_value=1.0, max_value=1e9)


def test_resonant_frequency(short_beam, long_beam, silicon, fundamental):
    f = cantileverq.resonant_frequency(short_beam, silicon, fundamental)
    assert f == pytest.approx(687887.0, rel=1e-4)
    # f ~ 1/L^2
    f_long = cantileverq.resonant_frequency(long_beam, silicon, fundamental)
    assert f_long == pytest.approx(f / 4)
    # f ~ k^2
    f2 = cantileverq.resonant_frequency(short_beam, silicon, cantileverq.ModeSpec(2))
    assert f2 / f == pytest.approx((4.6940911330 / 1.8751040687) ** 2)


def test_beam_mass(short_beam, silicon):
    assert cantileverq.beam_mass(short_beam, silicon) == pytest.approx(3.495e-11)


def test_support(short_beam, fundamental):
    assert cantileverq.q_support(short_beam, fundamental) == pytest.approx(16648.0)
    with pytest.raises(MissingModeConstantError):
        cantileverq.q_support(short_beam, cantileverq.ModeSpec(2))


@settings(max_examples=50, deadline=None)
@given(length=lengths, scale=st.floats(min_value=1.0, max_value=4.0))
def test_support_scaling(length, scale):
    g = cantileverq.Geometry(length, 30e-6, 5e-6)
    q = cantileverq.q_support(g, MODE)
    q_scaled = cantileverq.q_support(g.replace(length=scale * length), MODE)
    assert q_scaled / q == pytest.approx(scale**3, rel=1e-12)


def test_molecular(short_beam, silicon, fundamental, rarefied, vacuum):
    q = cantileverq.q_air_molecular(short_beam, silicon, rarefied, fundamental)
    assert q == pytest.approx(396846.0, rel=1e-4)
    with pytest.raises(ZeroPressureError):
        cantileverq.q_air_molecular(short_beam, silicon, vacuum, fundamental)


@settings(max_examples=50, deadline=None)
@given(p1=pressures, p2=pressures, t1=temperatures, t2=temperatures)
def test_molecular_scaling(p1, p2, t1, t2):
    g = cantileverq.Geometry(100e-6, 30e-6, 5e-6)
    q1 = cantileverq.q_air_molecular(g, SILICON, _air(p1, t1), MODE)
    q2 = cantileverq.q_air_molecular(g, SILICON, _air(p2, t2), MODE)
    assert q1 * p1 / math.sqrt(t1) == pytest.approx(q2 * p2 / math.sqrt(t2), rel=1e-12)


def test_viscous(short_beam, silicon, fundamental, atmosphere, vacuum):
    sphere = cantileverq.SphereModel(radius_factor=1.0)
    q = cantileverq.q_air_viscous(short_beam, silicon, atmosphere, fundamental, sphere)
    assert q == pytest.approx(1192.0, rel=2e-3)

    # Q ~ 1 / (R (1 + R/delta)), so a smaller sphere damps less
    q_half = cantileverq.q_air_viscous(
        short_beam, silicon, atmosphere, fundamental, SPHERE
    )
    assert q_half > q

    with pytest.raises(ZeroPressureError):
        cantileverq.q_air_viscous(short_beam, silicon, vacuum, fundamental, sphere)


def test_viscous_width(silicon, fundamental, atmosphere):
    # fixed sphere radius makes the viscous Q linear in width
    sphere = cantileverq.SphereModel(radius=15e-6)
    g = cantileverq.Geometry(200e-6, 30e-6, 5e-6)
    q1 = cantileverq.q_air_viscous(g, silicon, atmosphere, fundamental, sphere)
    q2 = cantileverq.q_air_viscous(
        g.replace(width=60e-6), silicon, atmosphere, fundamental, sphere
    )
    assert q2 / q1 == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize(
    "pressure,regime",
    [
        (101200.0, cantileverq.Regime.VISCOUS),
        (35.0, cantileverq.Regime.TRANSITION),
        (1.0, cantileverq.Regime.MOLECULAR),
    ],
)
def test_regime(short_beam, silicon, fundamental, pressure, regime):
    gas = _air(pressure)
    q, r = cantileverq.q_air(short_beam, silicon, gas, fundamental, SPHERE)
    assert r is regime
    q_visc = cantileverq.q_air_viscous(short_beam, silicon, gas, fundamental, SPHERE)
    q_mol = cantileverq.q_air_molecular(short_beam, silicon, gas, fundamental)
    if regime is cantileverq.Regime.VISCOUS:
        assert q == q_visc
    elif regime is cantileverq.Regime.MOLECULAR:
        assert q == q_mol
    else:
        assert min(q_visc, q_mol) < q < max(q_visc, q_mol)


def test_vacuum(short_beam, silicon, fundamental, vacuum):
    q, regime = cantileverq.q_air(short_beam, silicon, vacuum, fundamental, SPHERE)
    assert q == cantileverq.LOSSLESS
    assert regime is cantileverq.Regime.MOLECULAR


def test_thresholds(short_beam, silicon, fundamental, atmosphere):
    with pytest.raises(ValueError):
        cantileverq.q_air(
            short_beam, silicon, atmosphere, fundamental, SPHERE, 10.0, 0.01
        )
    with pytest.raises(ValueError):
        cantileverq.q_air(short_beam, silicon, atmosphere, fundamental, SPHERE, 0.0)


@pytest.mark.parametrize("knudsen", [KNUDSEN_VISCOUS, KNUDSEN_MOLECULAR])
def test_continuity(short_beam, silicon, fundamental, knudsen):
    # pressure at which the Knudsen number of the width equals the threshold
    d = 3.7e-10
    pressure = boltzmann_constant * 300.0 / (math.sqrt(2) * math.pi * d**2 * 30e-6)
    pressure /= knudsen

    below, _ = cantileverq.q_air(
        short_beam, silicon, _air(pressure * (1 - 1e-11)), fundamental, SPHERE
    )
    above, _ = cantileverq.q_air(
        short_beam, silicon, _air(pressure * (1 + 1e-11)), fundamental, SPHERE
    )
    assert abs(above - below) / below < 1e-9


def test_ted(short_beam, silicon, fundamental):
    f = cantileverq.resonant_frequency(short_beam, silicon, fundamental)
    tau = cantileverq.relaxation_time(short_beam, silicon)
    assert tau == pytest.approx(25e-12 * 1.631e6 / (math.pi**2 * 148.0))
    assert 2 * math.pi * f * tau == pytest.approx(0.1207, rel=1e-3)
    q = cantileverq.q_ted(short_beam, silicon, f, 300.0)
    assert q == pytest.approx(4.0e4, rel=1e-2)


def test_ted_missing_data(short_beam, bare_silicon):
    with pytest.raises(MissingThermalDataError, match="thermal_expansion"):
        cantileverq.q_ted(short_beam, bare_silicon, 1e5, 300.0)
    with pytest.raises(MissingThermalDataError):
        cantileverq.relaxation_time(short_beam, bare_silicon)


@settings(max_examples=100, deadline=None)
@given(log_x=st.floats(min_value=-2.5, max_value=2.5))
def test_ted_debye_peak(log_x):
    g = cantileverq.Geometry(100e-6, 30e-6, 5e-6)
    tau = cantileverq.relaxation_time(g, SILICON)
    strength = 169e9 * 2.6e-6**2 * 300.0 / 1.631e6

    def q_at(x):
        return cantileverq.q_ted(g, SILICON, x / (2 * math.pi * tau), 300.0)

    x = 10.0**log_x
    assert q_at(x) == pytest.approx(q_at(1 / x), rel=1e-12)
    assert q_at(x) >= q_at(1.0) * (1 - 1e-12)
    assert q_at(1.0) == pytest.approx(2 / strength, rel=1e-12)


def test_q_total_identity():
    assert cantileverq.q_total({"air": 1000.0}).q_total == pytest.approx(1000.0)
    assert cantileverq.q_total([("a", 500.0), ("b", 500.0)]).q_total == pytest.approx(
        250.0
    )
    budget = cantileverq.q_total({"air": 1000.0, "support": cantileverq.LOSSLESS})
    assert budget.q_total == pytest.approx(1000.0)
    assert cantileverq.q_total({"air": math.inf}).q_total == cantileverq.LOSSLESS


def test_q_total_invalid():
    with pytest.raises(EmptyChannelListError):
        cantileverq.q_total({})
    with pytest.raises(ValueError):
        cantileverq.q_total({"air": 0.0})
    with pytest.raises(ValueError):
        cantileverq.q_total({"air": -10.0})
    with pytest.raises(ValueError):
        cantileverq.q_total({"air": math.nan})
    with pytest.raises(ValueError, match="others"):
        cantileverq.q_total([("others", 2000.0), ("others", 2000.0)])


def test_q_total_shares_sum_to_one():
    budget = cantileverq.q_total(
        [("air", 2000.0), ("support", 4000.0), ("others", cantileverq.LOSSLESS)]
    )
    assert sum(budget.dissipation_shares().values()) == pytest.approx(1.0)
    assert 1.0 / budget.q_total == pytest.approx(1.0 / 2000.0 + 1.0 / 4000.0)


@settings(max_examples=100, deadline=None)
@given(st.lists(qualities, min_size=1, max_size=6))
def test_q_total_bound(channels):
    budget = cantileverq.q_total([(str(i), q) for i, q in enumerate(channels)])
    assert budget.q_total <= min(channels) * (1 + 1e-12)
    assert budget.q_total >= min(channels) / len(channels) * (1 - 1e-12)
    shares = budget.dissipation_shares()
    assert math.fsum(shares.values()) == pytest.approx(1.0, rel=1e-12)


def test_budget_record():
    budget = cantileverq.q_total(
        {"air": 1000.0, "support": 2000.0, "ted": math.inf, "coating": 4000.0},
        regime="viscous",
    )
    assert budget.q_air == 1000.0
    assert budget.q_others is None
    assert budget.regime is cantileverq.Regime.VISCOUS
    assert budget.dissipation_shares()["ted"] == 0.0

    record = budget.to_dict()
    assert list(record) == [
        "resonant_frequency",
        "regime",
        "q_air",
        "q_support",
        "q_ted",
        "q_others",
        "q_coating",
        "q_total",
        "effective_mass",
        "minimum_detectable_mass",
    ]
    assert record["regime"] == "viscous"
    assert record["q_coating"] == 4000.0


def test_mass_sensitivity():
    dm = cantileverq.mass_sensitivity(3.495e-11, 687887.0, 1113.0)
    assert dm == pytest.approx(2 * 3.495e-11 / 1113.0)
    assert cantileverq.mass_sensitivity(
        3.495e-11, 687887.0, 1113.0, 2.0
    ) == pytest.approx(2 * dm)
    assert cantileverq.mass_sensitivity(1e-11, 1e5, math.inf) == 0.0
    with pytest.raises(ValueError):
        cantileverq.mass_sensitivity(0.0, 1e5, 100.0)

    slope = cantileverq.mass_responsivity(3.495e-11, 687887.0)
    assert slope == pytest.approx(-687887.0 / (2 * 3.495e-11))
    assert slope < 0


@settings(max_examples=50, deadline=None)
@given(q1=qualities, q2=qualities)
def test_mass_sensitivity_monotone(q1, q2):
    dm1 = cantileverq.mass_sensitivity(3.495e-11, 687887.0, q1)
    dm2 = cantileverq.mass_sensitivity(3.495e-11, 687887.0, q2)
    if q1 < q2:
        assert dm1 >= dm2
    elif q1 > q2:
        assert dm1 <= dm2


def test_evaluate_budget(short_beam, silicon, atmosphere, calibrated_mode):
    sphere = cantileverq.SphereModel(radius_factor=1.0)
    budget = cantileverq.evaluate_budget(
        short_beam, silicon, atmosphere, calibrated_mode, sphere
    )
    assert list(budget.channels) == ["air", "support", "ted"]
    assert budget.regime is cantileverq.Regime.VISCOUS
    assert budget.resonant_frequency == pytest.approx(687887.0, rel=1e-4)
    assert budget.effective_mass == pytest.approx(3.495e-11)
    assert budget.minimum_detectable_mass == pytest.approx(
        2 * 3.495e-11 / budget.q_total
    )
    # air damping dominates at atmosphere
    assert budget.q_ted > 10 * budget.q_air
    assert budget.q_total < min(budget.channels.values())

    with_others = cantileverq.evaluate_budget(
        short_beam, silicon, atmosphere, calibrated_mode, sphere, q_others=5000.0
    )
    assert with_others.q_others == 5000.0
    assert 1 / with_others.q_total == pytest.approx(1 / budget.q_total + 1 / 5000.0)


def test_evaluate_budget_vacuum(short_beam, silicon, vacuum, fundamental):
    budget = cantileverq.evaluate_budget(
        short_beam, silicon, vacuum, fundamental, SPHERE
    )
    assert budget.q_air == cantileverq.LOSSLESS
    assert budget.dissipation_shares()["air"] == 0.0
    assert 1 / budget.q_total == pytest.approx(1 / budget.q_support + 1 / budget.q_ted)
