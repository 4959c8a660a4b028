"""Parameter sweeps and geometry optimization."""

import concurrent.futures
import enum
import logging
import math

import numpy
import scipy.optimize

from .dissipation import KNUDSEN_MOLECULAR, KNUDSEN_VISCOUS, evaluate_budget
from .errors import InfeasibleSpaceError, MissingModeConstantError
from .gas import GasEnvironment, SphereModel
from .geometry import Geometry
from .material import Material
from .modes import (
    DEFAULT_SUPPORT_LOSS_CONSTANTS,
    ModeSpec,
    mode_shape,
    mode_shape_nodes,
)

logger = logging.getLogger(__name__)


class OperatingPoint:
    """Complete set of inputs for one budget evaluation.

    Parameters
    ----------
    geometry : :class:`~cantileverq.Geometry`
        Beam geometry.
    material : :class:`~cantileverq.Material`
        Beam material.
    gas : :class:`~cantileverq.GasEnvironment`
        Gas state.
    mode : :class:`~cantileverq.ModeSpec`
        Mode.
    sphere : :class:`~cantileverq.SphereModel`
        Sphere approximation. Defaults to ``SphereModel()``.
    q_others : float
        Residual quality factor, or ``None``.
    knudsen_viscous : float
        Upper Knudsen number of the viscous regime.
    knudsen_molecular : float
        Lower Knudsen number of the molecular regime.
    frequency_resolution_factor : float
        Proportionality factor of the frequency resolution.

    """

    _fields = (
        "geometry",
        "material",
        "gas",
        "mode",
        "sphere",
        "q_others",
        "knudsen_viscous",
        "knudsen_molecular",
        "frequency_resolution_factor",
    )

    def __init__(
        self,
        geometry,
        material,
        gas,
        mode,
        sphere=None,
        q_others=None,
        knudsen_viscous=KNUDSEN_VISCOUS,
        knudsen_molecular=KNUDSEN_MOLECULAR,
        frequency_resolution_factor=1.0,
    ):
        if not isinstance(geometry, Geometry):
            geometry = Geometry.cast(geometry)
        if not isinstance(material, Material):
            raise TypeError("Material must be a Material")
        if not isinstance(gas, GasEnvironment):
            raise TypeError("Gas must be a GasEnvironment")
        if not isinstance(mode, ModeSpec):
            mode = ModeSpec.from_table(mode)
        if sphere is None:
            sphere = SphereModel()
        elif not isinstance(sphere, SphereModel):
            raise TypeError("Sphere must be a SphereModel")
        if q_others is not None and not q_others > 0:
            raise ValueError("Residual quality factor must be positive")

        self.geometry = geometry
        self.material = material
        self.gas = gas
        self.mode = mode
        self.sphere = sphere
        self.q_others = q_others
        self.knudsen_viscous = knudsen_viscous
        self.knudsen_molecular = knudsen_molecular
        self.frequency_resolution_factor = frequency_resolution_factor

    def evaluate(self):
        """Evaluate the budget.

        Returns
        -------
        :class:`~cantileverq.QBudget`
            The budget at this operating point.

        """
        return evaluate_budget(
            self.geometry,
            self.material,
            self.gas,
            self.mode,
            self.sphere,
            q_others=self.q_others,
            knudsen_viscous=self.knudsen_viscous,
            knudsen_molecular=self.knudsen_molecular,
            frequency_resolution_factor=self.frequency_resolution_factor,
        )

    def replace(self, **kwargs):
        """Copy the operating point with some inputs changed."""
        props = {f: getattr(self, f) for f in self._fields}
        props.update(kwargs)
        return OperatingPoint(**props)

    def __repr__(self):
        return (
            f"OperatingPoint({self.geometry!r}, {self.material.name!r}, "
            f"pressure={self.gas.pressure!r}, mode={self.mode.index})"
        )


class SweepAxis(str, enum.Enum):
    """Quantity varied by a sweep."""

    PRESSURE = "pressure"
    LENGTH = "length"
    WIDTH = "width"
    MODE = "mode"


class SweepSpec:
    """Sweep of one quantity with everything else held fixed.

    Parameters
    ----------
    axis : :class:`SweepAxis`
        Quantity to vary.
    values : list
        Values of the quantity, strictly increasing. Mode values are mode
        indices.
    fixed : :class:`OperatingPoint`
        Operating point supplying all other inputs.
    support_loss_constants : dict
        Support-loss constants by mode index, used for a mode sweep.

    """

    def __init__(self, axis, values, fixed, support_loss_constants=None):
        self.axis = SweepAxis(axis)
        if not isinstance(fixed, OperatingPoint):
            raise TypeError("Fixed inputs must be an OperatingPoint")
        self.fixed = fixed
        if support_loss_constants is None:
            support_loss_constants = DEFAULT_SUPPORT_LOSS_CONSTANTS
        self.support_loss_constants = dict(support_loss_constants)

        values = list(values)
        if len(values) == 0:
            raise ValueError("Sweep needs at least one value")
        if self.axis is SweepAxis.MODE:
            for v in values:
                if isinstance(v, bool) or int(v) != v or v < 1:
                    raise ValueError(f"Invalid mode index {v!r}")
                if int(v) not in self.support_loss_constants:
                    raise MissingModeConstantError(
                        f"No support-loss constant configured for mode {int(v)}"
                    )
            values = [int(v) for v in values]
        else:
            values = [float(v) for v in values]
        if any(b <= a for a, b in zip(values[:-1], values[1:])):
            raise ValueError("Sweep values must be strictly increasing")
        self.values = values

    def point_at(self, value):
        """Operating point for one sweep value.

        Parameters
        ----------
        value : float or int
            Value of the swept quantity.

        Returns
        -------
        :class:`OperatingPoint`
            The fixed operating point with the swept quantity replaced.

        """
        p = self.fixed
        if self.axis is SweepAxis.PRESSURE:
            return p.replace(gas=p.gas.replace(pressure=value))
        elif self.axis is SweepAxis.LENGTH:
            return p.replace(geometry=p.geometry.replace(length=value))
        elif self.axis is SweepAxis.WIDTH:
            return p.replace(geometry=p.geometry.replace(width=value))
        else:
            return p.replace(
                mode=ModeSpec.from_table(int(value), self.support_loss_constants)
            )

    def with_fixed(self, axis, value):
        """Copy the sweep with one of the fixed inputs changed.

        Parameters
        ----------
        axis : :class:`SweepAxis`
            Fixed quantity to change. It must differ from the swept axis.
        value : float or int
            New value.

        Returns
        -------
        :class:`SweepSpec`
            The new sweep.

        """
        axis = SweepAxis(axis)
        if axis is self.axis:
            raise ValueError("Series axis must differ from the sweep axis")
        shifted = SweepSpec(axis, [value], self.fixed, self.support_loss_constants)
        return SweepSpec(
            self.axis,
            self.values,
            shifted.point_at(shifted.values[0]),
            self.support_loss_constants,
        )


class SweepRow:
    """One row of a sweep table.

    Parameters
    ----------
    axis : :class:`SweepAxis`
        Swept quantity.
    value : float or int
        Value of the swept quantity.
    budget : :class:`~cantileverq.QBudget`
        Budget at this value, or ``None`` if the evaluation failed.
    error : str
        Reason the evaluation failed, or ``None``.
    series : tuple
        ``(axis, value)`` of the series this row belongs to, or ``None``.

    """

    def __init__(self, axis, value, budget=None, error=None, series=None):
        self.axis = SweepAxis(axis)
        self.value = value
        self.budget = budget
        self.error = error
        self.series = series

    @property
    def ok(self):
        """bool: True if the budget was evaluated."""
        return self.error is None

    def to_dict(self):
        """Convert to a flat record with fixed field order."""
        record = {}
        if self.series is not None:
            series_axis, series_value = self.series
            record[SweepAxis(series_axis).value] = series_value
        record[self.axis.value] = self.value
        if self.budget is not None:
            record.update(self.budget.to_dict())
        else:
            record.update(_EMPTY_BUDGET)
        record["error"] = self.error
        return record

    def __repr__(self):
        return f"SweepRow({self.axis.value}={self.value!r}, error={self.error!r})"


_EMPTY_BUDGET = {
    k: None
    for k in (
        "resonant_frequency",
        "regime",
        "q_air",
        "q_support",
        "q_ted",
        "q_others",
        "q_total",
        "effective_mass",
        "minimum_detectable_mass",
    )
}


def _evaluate_row(spec, value, series):
    try:
        budget = spec.point_at(value).evaluate()
    except ValueError as e:
        logger.debug("Sweep point %s = %r failed: %s", spec.axis.value, value, e)
        return SweepRow(spec.axis, value, error=str(e), series=series)
    return SweepRow(spec.axis, value, budget=budget, series=series)


def run_sweep(spec, workers=None, series=None):
    """Evaluate a budget at every value of a sweep.

    A point whose evaluation fails is recorded with its error message
    instead of stopping the sweep.

    Parameters
    ----------
    spec : :class:`SweepSpec`
        The sweep.
    workers : int
        Number of threads to evaluate points with. The default of ``None``
        evaluates points one after another.
    series : tuple
        ``(axis, value)`` label attached to every row.

    Returns
    -------
    list of :class:`SweepRow`
        One row per value, in the order of the values.

    """
    logger.info("Sweeping %s over %d values", spec.axis.value, len(spec.values))
    if workers is not None and workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(
                pool.map(lambda v: _evaluate_row(spec, v, series), spec.values)
            )
    else:
        rows = [_evaluate_row(spec, v, series) for v in spec.values]
    failed = sum(1 for r in rows if not r.ok)
    if failed > 0:
        logger.warning("%d of %d sweep points failed", failed, len(rows))
    return rows


def run_sweep_series(spec, axis, values, workers=None):
    """Repeat a sweep for several values of another quantity.

    Parameters
    ----------
    spec : :class:`SweepSpec`
        The sweep.
    axis : :class:`SweepAxis`
        Fixed quantity that labels each series.
    values : list
        Values of the series quantity.
    workers : int
        Number of threads per sweep.

    Returns
    -------
    list of :class:`SweepRow`
        Rows of every series, series by series.

    """
    axis = SweepAxis(axis)
    rows = []
    for v in values:
        rows += run_sweep(spec.with_fixed(axis, v), workers=workers, series=(axis, v))
    return rows


class ModeRow:
    """One row of a mode sweep.

    Parameters
    ----------
    mode : int
        Mode index.
    budget : :class:`~cantileverq.QBudget`
        Budget of the mode.
    nodes : list of float
        Interior node positions normalized by the length.
    actuation_displacement : float
        Mode-shape displacement at the actuation position relative to the tip,
        or ``None``.
    series : tuple
        ``(axis, value)`` of the series this row belongs to, or ``None``.

    """

    def __init__(self, mode, budget, nodes, actuation_displacement=None, series=None):
        self.mode = mode
        self.budget = budget
        self.nodes = nodes
        self.actuation_displacement = actuation_displacement
        self.series = series

    def to_dict(self):
        """Convert to a flat record with fixed field order."""
        record = {}
        if self.series is not None:
            series_axis, series_value = self.series
            record[SweepAxis(series_axis).value] = series_value
        record["mode"] = self.mode
        record.update(self.budget.to_dict())
        record["nodes"] = list(self.nodes)
        record["actuation_displacement"] = self.actuation_displacement
        return record


def mode_sweep(
    geometry,
    material,
    gas,
    modes,
    support_loss_constants,
    sphere=None,
    actuation_position=None,
    **kwargs,
):
    """Evaluate budgets and node points for several modes.

    Parameters
    ----------
    geometry : :class:`~cantileverq.Geometry`
        Beam geometry.
    material : :class:`~cantileverq.Material`
        Beam material.
    gas : :class:`~cantileverq.GasEnvironment`
        Gas state.
    modes : list of int
        Mode indices.
    support_loss_constants : dict
        Support-loss constants by mode index.
    sphere : :class:`~cantileverq.SphereModel`
        Sphere approximation.
    actuation_position : float
        Position of the actuator normalized by the length. If given, each row
        reports the relative mode displacement there; a value near zero means
        the actuator sits near a node.
    kwargs
        Other :class:`OperatingPoint` inputs.

    Returns
    -------
    list of :class:`ModeRow`
        One row per mode, in the order given.

    Raises
    ------
    MissingModeConstantError
        If a mode has no support-loss constant.

    """
    specs = [ModeSpec.from_table(n, support_loss_constants) for n in modes]
    rows = []
    for mode in specs:
        point = OperatingPoint(geometry, material, gas, mode, sphere=sphere, **kwargs)
        displacement = None
        if actuation_position is not None:
            displacement = mode_shape(mode, actuation_position)
        rows.append(
            ModeRow(mode.index, point.evaluate(), mode_shape_nodes(mode), displacement)
        )
    return rows


def mode_sweep_series(
    geometry,
    material,
    gas,
    modes,
    support_loss_constants,
    axis,
    values,
    **kwargs,
):
    """Repeat a mode sweep for several lengths, widths, or pressures.

    Parameters
    ----------
    geometry : :class:`~cantileverq.Geometry`
        Beam geometry.
    material : :class:`~cantileverq.Material`
        Beam material.
    gas : :class:`~cantileverq.GasEnvironment`
        Gas state.
    modes : list of int
        Mode indices.
    support_loss_constants : dict
        Support-loss constants by mode index.
    axis : :class:`SweepAxis`
        Quantity that labels each series. It cannot be the mode.
    values : list
        Values of the series quantity.
    kwargs
        Other :func:`mode_sweep` inputs.

    Returns
    -------
    list of :class:`ModeRow`
        Rows of every series, series by series.

    """
    axis = SweepAxis(axis)
    if axis is SweepAxis.MODE:
        raise ValueError("Mode sweep series cannot be labeled by mode")
    rows = []
    for v in values:
        v = float(v)
        g, p = geometry, gas
        if axis is SweepAxis.LENGTH:
            g = geometry.replace(length=v)
        elif axis is SweepAxis.WIDTH:
            g = geometry.replace(width=v)
        else:
            p = gas.replace(pressure=v)
        for row in mode_sweep(g, material, p, modes, support_loss_constants, **kwargs):
            row.series = (axis, v)
            rows.append(row)
    return rows


class Objective(str, enum.Enum):
    """Design objective."""

    MAX_Q_TOTAL = "max_q_total"
    MIN_DETECTABLE_MASS = "min_detectable_mass"

    def score(self, budget):
        """Value to maximize for a budget."""
        if self is Objective.MAX_Q_TOTAL:
            return budget.q_total
        else:
            return -budget.minimum_detectable_mass

    def measure(self, budget):
        """Objective value in its natural units."""
        if self is Objective.MAX_Q_TOTAL:
            return budget.q_total
        else:
            return budget.minimum_detectable_mass


class Constraint:
    """Design constraint.

    Parameters
    ----------
    kind : str
        One of ``min_frequency``, ``max_frequency``, ``max_footprint``, or
        ``min_q_total``.
    value : float
        Bound of the constraint.

    """

    kinds = ("min_frequency", "max_frequency", "max_footprint", "min_q_total")

    def __init__(self, kind, value):
        if kind not in self.kinds:
            raise ValueError(f"Unknown constraint {kind!r}")
        value = float(value)
        if not value > 0:
            raise ValueError("Constraint bound must be positive")
        self.kind = kind
        self.value = value

    def is_satisfied(self, geometry, budget):
        """Check the constraint.

        Parameters
        ----------
        geometry : :class:`~cantileverq.Geometry`
            Candidate geometry.
        budget : :class:`~cantileverq.QBudget`
            Budget of the candidate.

        Returns
        -------
        bool
            True if the candidate satisfies the constraint.

        """
        if self.kind == "min_frequency":
            return budget.resonant_frequency >= self.value
        elif self.kind == "max_frequency":
            return budget.resonant_frequency <= self.value
        elif self.kind == "max_footprint":
            return geometry.footprint <= self.value
        else:
            return budget.q_total >= self.value

    def __repr__(self):
        return f"Constraint({self.kind!r}, {self.value!r})"


class DesignSpace:
    """Region of geometries to optimize over.

    The thickness is fixed; the length and width vary within their ranges.

    Parameters
    ----------
    length_range : tuple
        Lower and upper length (m). Equal bounds fix the length.
    width_range : tuple
        Lower and upper width (m). Equal bounds fix the width.
    thickness : float
        Thickness (m).
    point : :class:`OperatingPoint`
        Operating point supplying the material, gas, mode, and model inputs.
        Its geometry is ignored.
    objective : :class:`Objective`
        Design objective.
    constraints : list of :class:`Constraint`
        Constraints every returned design must satisfy.
    grid_shape : tuple
        Number of grid points along length and width.
    refine : bool
        If True, refine the best grid point by Nelder-Mead.
    max_iterations : int
        Iteration cap of the refinement.

    """

    def __init__(
        self,
        length_range,
        width_range,
        thickness,
        point,
        objective=Objective.MAX_Q_TOTAL,
        constraints=(),
        grid_shape=(32, 32),
        refine=True,
        max_iterations=200,
    ):
        self.length_range = self._check_range(length_range, "Length")
        self.width_range = self._check_range(width_range, "Width")
        thickness = float(thickness)
        if not thickness > 0:
            raise ValueError("Thickness must be positive")
        self.thickness = thickness
        if not isinstance(point, OperatingPoint):
            raise TypeError("Design space needs an OperatingPoint")
        self.point = point
        self.objective = Objective(objective)
        self.constraints = list(constraints)
        for c in self.constraints:
            if not isinstance(c, Constraint):
                raise TypeError("Constraints must be Constraint objects")
        grid_shape = tuple(int(n) for n in grid_shape)
        if len(grid_shape) != 2 or min(grid_shape) < 2:
            raise ValueError("Grid needs at least 2 points along each axis")
        self.grid_shape = grid_shape
        self.refine = bool(refine)
        self.max_iterations = int(max_iterations)

    @staticmethod
    def _check_range(value, name):
        lo, hi = (float(v) for v in value)
        if not 0 < lo <= hi:
            raise ValueError(f"{name} range must satisfy 0 < lower <= upper")
        return (lo, hi)

    def to_geometry(self, u):
        """Map unit-square coordinates onto a geometry.

        Parameters
        ----------
        u : tuple
            Coordinates in ``[0, 1]`` along length and width.

        Returns
        -------
        tuple
            Length and width.

        """
        (Llo, Lhi), (Wlo, Whi) = self.length_range, self.width_range
        return Llo + u[0] * (Lhi - Llo), Wlo + u[1] * (Whi - Wlo)


class TraceEntry:
    """One evaluation made by the optimizer.

    Parameters
    ----------
    stage : str
        ``grid`` or ``refine``.
    length : float
        Candidate length.
    width : float
        Candidate width.
    feasible : bool
        True if the candidate is a valid geometry satisfying every constraint.
    objective : float
        Objective value in natural units, or ``None`` if not evaluated.
    q_total : float
        Composite quality factor, or ``None`` if not evaluated.
    reason : str
        Why the candidate is infeasible, or ``None``.

    """

    def __init__(
        self, stage, length, width, feasible, objective=None, q_total=None, reason=None
    ):
        self.stage = stage
        self.length = length
        self.width = width
        self.feasible = feasible
        self.objective = objective
        self.q_total = q_total
        self.reason = reason

    def to_dict(self):
        """Convert to a record with fixed field order."""
        return {
            "stage": self.stage,
            "length": self.length,
            "width": self.width,
            "feasible": self.feasible,
            "objective": self.objective,
            "q_total": self.q_total,
            "reason": self.reason,
        }


class _Evaluator:
    """Evaluates candidates and keeps the trace."""

    def __init__(self, space):
        self.space = space
        self.trace = []
        self.best = None

    def __call__(self, stage, u):
        space = self.space
        L, W = space.to_geometry(u)
        try:
            geometry = Geometry(L, W, space.thickness)
            budget = space.point.replace(geometry=geometry).evaluate()
        except ValueError as e:
            self.trace.append(TraceEntry(stage, L, W, False, reason=str(e)))
            return None

        violated = [
            c.kind
            for c in space.constraints
            if not c.is_satisfied(geometry, budget)
        ]
        entry = TraceEntry(
            stage,
            L,
            W,
            len(violated) == 0,
            objective=space.objective.measure(budget),
            q_total=budget.q_total,
            reason=", ".join(violated) if violated else None,
        )
        self.trace.append(entry)
        if violated:
            return None

        score = space.objective.score(budget)
        if self.best is None or score > self.best[0]:
            self.best = (score, geometry, budget, tuple(u))
        return score


def optimize_geometry(space):
    """Optimize the length and width of a cantilever.

    The design space is first scanned on a grid that includes the range end
    points. Unless disabled, the best feasible grid point is then refined by
    Nelder-Mead with an initial simplex of one grid cell. Infeasible
    candidates are rejected rather than penalized. The best feasible
    candidate of all evaluations is returned.

    Parameters
    ----------
    space : :class:`DesignSpace`
        The design space.

    Returns
    -------
    tuple
        Optimal :class:`~cantileverq.Geometry`, its
        :class:`~cantileverq.QBudget`, and the list of :class:`TraceEntry`.

    Raises
    ------
    InfeasibleSpaceError
        If no grid point is feasible.

    """
    evaluate = _Evaluator(space)
    free = [
        space.length_range[0] < space.length_range[1],
        space.width_range[0] < space.width_range[1],
    ]
    axes = [
        numpy.linspace(0.0, 1.0, n) if is_free else numpy.zeros(1)
        for n, is_free in zip(space.grid_shape, free)
    ]
    for uL in axes[0]:
        for uW in axes[1]:
            evaluate("grid", (uL, uW))

    num_feasible = sum(1 for e in evaluate.trace if e.feasible)
    logger.info(
        "Grid scan: %d of %d points feasible", num_feasible, len(evaluate.trace)
    )
    if evaluate.best is None:
        raise InfeasibleSpaceError("No grid point satisfies the constraints")

    if space.refine and any(free):
        _refine(space, evaluate, axes, free)

    _, geometry, budget, _ = evaluate.best
    logger.info(
        "Optimum L = %g m, W = %g m, %s = %g",
        geometry.length,
        geometry.width,
        space.objective.value,
        space.objective.measure(budget),
    )
    return geometry, budget, evaluate.trace


def _refine(space, evaluate, axes, free):
    start_score, _, _, u_best = evaluate.best
    scale = abs(start_score)
    dims = [i for i in range(2) if free[i]]

    def unpack(v):
        u = list(u_best)
        for i, d in enumerate(dims):
            u[d] = v[i]
        return u

    def cost(v):
        if numpy.any(v < 0) or numpy.any(v > 1):
            return math.inf
        score = evaluate("refine", unpack(v))
        if score is None:
            return math.inf
        return -score / scale

    x0 = numpy.array([u_best[d] for d in dims])
    simplex = [x0]
    for i, d in enumerate(dims):
        step = axes[d][1] - axes[d][0]
        vertex = x0.copy()
        vertex[i] = x0[i] + step if x0[i] + step <= 1 else x0[i] - step
        simplex.append(vertex)

    result = scipy.optimize.minimize(
        cost,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": numpy.array(simplex),
            "xatol": 1e-9,
            "fatol": 1e-12,
            "maxiter": space.max_iterations,
        },
    )
    logger.debug(
        "Refinement stopped after %d evaluations: %s", result.nfev, result.message
    )
