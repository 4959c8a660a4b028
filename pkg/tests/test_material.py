import pytest

import cantileverq


def test_create(silicon):
    m = silicon
    assert m.name == "silicon"
    assert m.youngs_modulus == pytest.approx(169e9)
    assert m.density == pytest.approx(2330.0)
    assert m.thermal_expansion == pytest.approx(2.6e-6)
    assert m.heat_capacity_volumetric == pytest.approx(1.631e6)
    assert m.thermal_conductivity == pytest.approx(148.0)
    assert m.coating is None
    assert m.has_thermal_data()
    assert m.missing_thermal_fields() == []


def test_thermal_optional(bare_silicon):
    m = bare_silicon
    assert not m.has_thermal_data()
    assert m.missing_thermal_fields() == [
        "thermal_expansion",
        "heat_capacity_volumetric",
        "thermal_conductivity",
    ]

    m.thermal_expansion = 2.6e-6
    assert m.missing_thermal_fields() == [
        "heat_capacity_volumetric",
        "thermal_conductivity",
    ]


@pytest.mark.parametrize(
    "field", ["youngs_modulus", "density", "thermal_expansion", "thermal_conductivity"]
)
def test_nonpositive(silicon, field):
    with pytest.raises(ValueError):
        setattr(silicon, field, 0.0)
    with pytest.raises(ValueError):
        setattr(silicon, field, -1.0)
    with pytest.raises(TypeError):
        setattr(silicon, field, "stiff")


def test_required():
    with pytest.raises(TypeError):
        cantileverq.Material("x", youngs_modulus=None, density=2330.0)
    with pytest.raises(TypeError):
        cantileverq.Material("", youngs_modulus=169e9, density=2330.0)
    with pytest.raises(TypeError):
        cantileverq.Material(3, youngs_modulus=169e9, density=2330.0)


def test_coating(silicon):
    silicon.coating = "Au/Cr"
    assert silicon.coating == "Au/Cr"
    with pytest.raises(TypeError):
        silicon.coating = 42


def test_dict(silicon):
    d = silicon.to_dict()
    assert d["name"] == "silicon"
    name = d.pop("name")
    m = cantileverq.Material.from_dict(name, d)
    assert m == silicon

    m.density = 2000.0
    assert m != silicon
