import pathlib

import pytest

import cantileverq
from cantileverq.errors import InfeasibleSpaceError

CONFIGS = pathlib.Path(__file__).parent.parent / "configs"


@pytest.fixture
def design_point(short_beam, silicon, atmosphere, fundamental):
    return cantileverq.OperatingPoint(short_beam, silicon, atmosphere, fundamental)


@pytest.fixture
def mass_space(design_point):
    return cantileverq.DesignSpace(
        (100e-6, 500e-6),
        (30e-6, 90e-6),
        5e-6,
        design_point,
        objective="min_detectable_mass",
    )


@pytest.fixture
def q_space(design_point):
    return cantileverq.DesignSpace(
        (50e-6, 400e-6),
        (30e-6, 90e-6),
        5e-6,
        design_point.replace(sphere=cantileverq.SphereModel(radius=15e-6)),
    )


def _oracle(space):
    grid = cantileverq.DesignSpace(
        space.length_range,
        space.width_range,
        space.thickness,
        space.point,
        space.objective,
        space.constraints,
        grid_shape=(256, 256),
        refine=False,
    )
    return cantileverq.optimize_geometry(grid)


def _check_best_in_trace(space, budget, trace):
    value = space.objective.measure(budget)
    for e in trace:
        if not e.feasible:
            continue
        if space.objective is cantileverq.Objective.MAX_Q_TOTAL:
            assert e.objective <= value
        else:
            assert e.objective >= value


def test_min_mass_corner(mass_space):
    geometry, budget, trace = cantileverq.optimize_geometry(mass_space)
    assert geometry.length == pytest.approx(100e-6)
    assert geometry.width == pytest.approx(30e-6)
    assert geometry.thickness == 5e-6
    _check_best_in_trace(mass_space, budget, trace)


def test_max_q_interior(q_space):
    geometry, budget, trace = cantileverq.optimize_geometry(q_space)
    assert geometry.width == pytest.approx(90e-6, rel=1e-2)
    assert 150e-6 < geometry.length < 300e-6
    _check_best_in_trace(q_space, budget, trace)


def test_inactive_constraints(q_space):
    _, free_budget, _ = cantileverq.optimize_geometry(q_space)
    q_space.constraints = [
        cantileverq.Constraint("max_footprint", 3e-8),
        cantileverq.Constraint("min_frequency", 1e5),
    ]
    geometry, budget, trace = cantileverq.optimize_geometry(q_space)
    assert geometry.footprint <= 3e-8
    assert budget.resonant_frequency >= 1e5
    assert budget.q_total == pytest.approx(free_budget.q_total, rel=1e-3)
    # long wide corners break both constraints
    assert any(not e.feasible and e.reason is not None for e in trace)


@pytest.mark.parametrize(
    "name", ["design.yaml", "design_max_q.yaml", "design_constrained.yaml"]
)
def test_grid_oracle(name):
    space = cantileverq.load_config(CONFIGS / name).design_space()
    geometry, budget, trace = cantileverq.optimize_geometry(space)
    assert all(c.is_satisfied(geometry, budget) for c in space.constraints)
    _check_best_in_trace(space, budget, trace)

    _, oracle, _ = _oracle(space)
    value = space.objective.measure(budget)
    expected = space.objective.measure(oracle)
    assert value == pytest.approx(expected, rel=1e-3)


def test_active_constraint(design_point):
    space = cantileverq.DesignSpace(
        (50e-6, 400e-6),
        (30e-6, 90e-6),
        5e-6,
        design_point,
        constraints=[cantileverq.Constraint("min_frequency", 4e5)],
    )
    geometry, budget, trace = cantileverq.optimize_geometry(space)
    assert budget.resonant_frequency >= 4e5
    assert geometry.length <= 132e-6
    _check_best_in_trace(space, budget, trace)

    rejected = [e for e in trace if e.reason == "min_frequency"]
    assert len(rejected) > 0
    assert all(e.length > 130e-6 for e in rejected)


def test_trace(q_space):
    _, _, trace = cantileverq.optimize_geometry(q_space)
    stages = [e.stage for e in trace]
    assert stages[: 32 * 32] == ["grid"] * (32 * 32)
    assert "refine" in stages
    assert set(stages) == {"grid", "refine"}

    # grid includes the range end points
    lengths = {e.length for e in trace[: 32 * 32]}
    assert min(lengths) == pytest.approx(50e-6)
    assert max(lengths) == pytest.approx(400e-6)

    # the narrow-long corner at L = 50 um cannot hold W = 90 um
    invalid = [e for e in trace if e.objective is None]
    assert all(e.width > e.length for e in invalid)
    assert all("width" in e.reason.lower() for e in invalid)


def test_no_refine(q_space):
    q_space.refine = False
    _, _, trace = cantileverq.optimize_geometry(q_space)
    assert len(trace) == 32 * 32
    assert all(e.stage == "grid" for e in trace)


def test_fixed_length(design_point):
    space = cantileverq.DesignSpace(
        (200e-6, 200e-6),
        (30e-6, 90e-6),
        5e-6,
        design_point,
        grid_shape=(8, 8),
    )
    geometry, _, trace = cantileverq.optimize_geometry(space)
    assert geometry.length == 200e-6
    assert all(e.length == 200e-6 for e in trace)
    assert len([e for e in trace if e.stage == "grid"]) == 8


def test_fixed_point(design_point):
    space = cantileverq.DesignSpace(
        (200e-6, 200e-6), (30e-6, 30e-6), 5e-6, design_point
    )
    geometry, budget, trace = cantileverq.optimize_geometry(space)
    assert geometry == cantileverq.Geometry(200e-6, 30e-6, 5e-6)
    assert len(trace) == 1


def test_infeasible(mass_space):
    mass_space.constraints = [cantileverq.Constraint("min_q_total", 1e9)]
    with pytest.raises(InfeasibleSpaceError):
        cantileverq.optimize_geometry(mass_space)


@pytest.mark.parametrize(
    "kwargs,error",
    [
        ({"length_range": (500e-6, 100e-6)}, ValueError),
        ({"length_range": (0.0, 100e-6)}, ValueError),
        ({"thickness": -5e-6}, ValueError),
        ({"grid_shape": (1, 8)}, ValueError),
        ({"objective": "max_frequency"}, ValueError),
        ({"constraints": [("min_frequency", 1e5)]}, TypeError),
        ({"point": None}, TypeError),
    ],
)
def test_design_space_invalid(design_point, kwargs, error):
    args = {
        "length_range": (100e-6, 500e-6),
        "width_range": (30e-6, 90e-6),
        "thickness": 5e-6,
        "point": design_point,
    }
    args.update(kwargs)
    with pytest.raises(error):
        cantileverq.DesignSpace(**args)


@pytest.mark.parametrize("kind,value", [("max_q", 1.0), ("min_frequency", 0.0)])
def test_constraint_invalid(kind, value):
    with pytest.raises(ValueError):
        cantileverq.Constraint(kind, value)
