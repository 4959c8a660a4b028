import pytest
from pytest_lazy_fixtures import lf

import cantileverq


@pytest.fixture
def silicon():
    return cantileverq.Material(
        "silicon",
        youngs_modulus=169e9,
        density=2330.0,
        thermal_expansion=2.6e-6,
        heat_capacity_volumetric=1.631e6,
        thermal_conductivity=148.0,
    )


@pytest.fixture
def bare_silicon():
    return cantileverq.Material("bare", youngs_modulus=169e9, density=2330.0)


@pytest.fixture
def short_beam():
    return cantileverq.Geometry(100e-6, 30e-6, 5e-6)


@pytest.fixture
def long_beam():
    return cantileverq.Geometry(200e-6, 30e-6, 5e-6)


@pytest.fixture(params=[lf("short_beam"), lf("long_beam")])
def beam(request):
    return request.param


def _air(pressure):
    return cantileverq.GasEnvironment(
        pressure=pressure,
        temperature=300.0,
        viscosity=1.85e-5,
        molar_mass=0.028964,
        molecule_diameter=3.7e-10,
    )


@pytest.fixture
def atmosphere():
    return _air(101200.0)


@pytest.fixture
def rarefied():
    return _air(35.0)


@pytest.fixture
def vacuum():
    return _air(0.0)


@pytest.fixture
def fundamental():
    return cantileverq.ModeSpec(1, support_loss_constant=2.081)


@pytest.fixture
def calibrated_mode():
    return cantileverq.ModeSpec(1, support_loss_constant=1.19)


@pytest.fixture
def calibrated_sphere():
    return cantileverq.SphereModel(radius_factor=1.0)


@pytest.fixture
def calibrated_point(
    short_beam, silicon, atmosphere, calibrated_mode, calibrated_sphere
):
    return cantileverq.OperatingPoint(
        short_beam, silicon, atmosphere, calibrated_mode, sphere=calibrated_sphere
    )


@pytest.fixture
def write_config(tmp_path):
    """Write YAML text to a config file and return its path."""

    def _write(text, name="run.yaml"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write
