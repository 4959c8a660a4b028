"""Declarative run configuration.

A run is described by a YAML document. Every section is validated before any
computation, unknown keys are rejected, and every default that is applied is
recorded in a provenance block so that a run can be reproduced from its
output alone.

A minimal configuration::

    material: silicon
    geometry:
      length: 100.0e-6
      width: 30.0e-6
      thickness: 5.0e-6

"""

import logging
import math
import pathlib

import numpy

from .database import MaterialDatabase, read_yaml
from .dissipation import KNUDSEN_MOLECULAR, KNUDSEN_VISCOUS
from .errors import ConfigValidationError
from .explorer import (
    Constraint,
    DesignSpace,
    Objective,
    OperatingPoint,
    SweepAxis,
    SweepSpec,
)
from .gas import GasEnvironment, SphereModel, standard_pressure
from .geometry import Geometry
from .material import Material
from .modes import DEFAULT_SUPPORT_LOSS_CONSTANTS, ModeSpec

logger = logging.getLogger(__name__)

#: Rule for the boundary-layer thickness of the viscous air model.
BOUNDARY_LAYER_RULE = "delta = sqrt(2 mu / (rho_gas omega)), rho_gas = P M / (R T)"

#: Rule for the thermal relaxation time of the thermoelastic model.
RELAXATION_TIME_RULE = "tau = t^2 C_V / (pi^2 kappa)"

_sections = (
    "material",
    "geometry",
    "gas",
    "mode",
    "support_loss_constants",
    "sphere",
    "regime",
    "sensitivity",
    "q_others",
    "sweep",
    "optimize",
    "output",
)


def _check_keys(section, name, allowed):
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise ConfigValidationError(name, "must be a mapping")
    for key in section:
        if key not in allowed:
            field = f"{name}.{key}" if name else str(key)
            raise ConfigValidationError(field, "unknown key")
    return section


def _number(value, field, allow_zero=False):
    if isinstance(value, bool):
        raise ConfigValidationError(field, "must be a number")
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigValidationError(field, "must be a number")
    if not math.isfinite(v):
        raise ConfigValidationError(field, "must be finite")
    if v < 0 or (v == 0 and not allow_zero):
        raise ConfigValidationError(
            field, "must be nonnegative" if allow_zero else "must be positive"
        )
    return v


def _integer(value, field, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigValidationError(field, "must be an integer")
    if value < minimum:
        raise ConfigValidationError(field, f"must be at least {minimum}")
    return value


def _range(value, field):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigValidationError(field, "must be a [lower, upper] pair")
    lo = _number(value[0], f"{field}[0]")
    hi = _number(value[1], f"{field}[1]")
    if lo > hi:
        raise ConfigValidationError(field, "lower bound exceeds upper bound")
    return (lo, hi)


class Provenance:
    """Record of where every run setting came from.

    Each entry maps a dotted key to its value and its source, which is
    ``config`` if the value was given, ``default`` if a default was applied,
    or ``rule`` for a fixed model rule.

    """

    def __init__(self):
        self._entries = {}

    def record(self, key, value, source):
        self._entries[key] = {"value": value, "source": source}

    def take(self, section, key, default, prefix):
        """Get a value from a section, recording a default if it is absent."""
        dotted = f"{prefix}.{key}"
        if key in section and section[key] is not None:
            self.record(dotted, section[key], "config")
            return section[key], True
        self.record(dotted, default, "default")
        return default, False

    def defaults(self):
        """list of str: Keys whose default value was applied."""
        return [k for k, v in self._entries.items() if v["source"] == "default"]

    def to_dict(self):
        return {k: dict(v) for k, v in self._entries.items()}

    def __getitem__(self, key):
        return self._entries[key]

    def __contains__(self, key):
        return key in self._entries


class RunConfig:
    """Validated run configuration.

    Use :func:`load_config` to create one from a file.

    Attributes
    ----------
    material : :class:`~cantileverq.Material`
        Beam material.
    geometry : :class:`~cantileverq.Geometry`
        Beam geometry.
    gas : :class:`~cantileverq.GasEnvironment`
        Gas state.
    mode : :class:`~cantileverq.ModeSpec`
        Mode.
    support_loss_constants : dict
        Support-loss constants by mode index.
    sphere : :class:`~cantileverq.SphereModel`
        Sphere approximation.
    knudsen_viscous : float
        Upper Knudsen number of the viscous regime.
    knudsen_molecular : float
        Lower Knudsen number of the molecular regime.
    frequency_resolution_factor : float
        Proportionality factor of the frequency resolution.
    q_others : float
        Residual quality factor, or ``None``.
    sweep : dict
        Validated sweep stanza, or ``None``.
    optimize : dict
        Validated optimize stanza, or ``None``.
    output_directory : :class:`pathlib.Path`
        Directory for output files.
    output_name : str
        Stem of output file names.
    provenance : :class:`Provenance`
        Source of every setting.

    """

    def __init__(self, **kwargs):
        for key, value in kwargs.items():
            setattr(self, key, value)

    def operating_point(self):
        """:class:`~cantileverq.explorer.OperatingPoint`: Configured point."""
        return OperatingPoint(
            self.geometry,
            self.material,
            self.gas,
            self.mode,
            sphere=self.sphere,
            q_others=self.q_others,
            knudsen_viscous=self.knudsen_viscous,
            knudsen_molecular=self.knudsen_molecular,
            frequency_resolution_factor=self.frequency_resolution_factor,
        )

    def sweep_spec(self):
        """:class:`~cantileverq.explorer.SweepSpec`: Configured sweep."""
        if self.sweep is None:
            raise ConfigValidationError("sweep", "is required for a sweep run")
        return SweepSpec(
            self.sweep["axis"],
            self.sweep["values"],
            self.operating_point(),
            self.support_loss_constants,
        )

    def design_space(self):
        """:class:`~cantileverq.explorer.DesignSpace`: Configured space."""
        if self.optimize is None:
            raise ConfigValidationError("optimize", "is required for an optimize run")
        opt = self.optimize
        return DesignSpace(
            opt["length_range"],
            opt["width_range"],
            opt["thickness"],
            self.operating_point(),
            objective=opt["objective"],
            constraints=[Constraint(k, v) for k, v in opt["constraints"].items()],
            grid_shape=opt["grid"],
            refine=opt["refine"],
            max_iterations=opt["max_iterations"],
        )

    def output_path(self, suffix):
        """Path of an output file named ``<name>_<suffix>``."""
        return self.output_directory / f"{self.output_name}_{suffix}"


def _load_material(value, database):
    if isinstance(value, str):
        if value not in database:
            known = ", ".join(sorted(database))
            raise ConfigValidationError(
                "material", f"unknown material {value!r} (known: {known})"
            )
        return database[value], value
    section = _check_keys(
        value,
        "material",
        (
            "name",
            "youngs_modulus",
            "density",
            "thermal_expansion",
            "heat_capacity_volumetric",
            "thermal_conductivity",
            "coating",
        ),
    )
    props = dict(section)
    name = str(props.pop("name", "custom"))
    for key in list(props):
        if key != "coating" and props[key] is not None:
            props[key] = _number(props[key], f"material.{key}")
    for key in ("youngs_modulus", "density"):
        if key not in props:
            raise ConfigValidationError(f"material.{key}", "is required")
    try:
        return Material.from_dict(name, props), name
    except (TypeError, ValueError) as e:
        raise ConfigValidationError("material", str(e))


def _load_sweep(section, prov):
    section = _check_keys(
        section, "sweep", ("axis", "values", "logspace", "series", "actuation_position")
    )
    if "axis" not in section:
        raise ConfigValidationError("sweep.axis", "is required")
    try:
        axis = SweepAxis(section["axis"])
    except ValueError:
        choices = ", ".join(a.value for a in SweepAxis)
        raise ConfigValidationError("sweep.axis", f"must be one of {choices}")

    has_values = section.get("values") is not None
    has_logspace = section.get("logspace") is not None
    if has_values == has_logspace:
        raise ConfigValidationError("sweep", "give exactly one of values or logspace")
    if has_values:
        values = section["values"]
        if not isinstance(values, list) or len(values) == 0:
            raise ConfigValidationError("sweep.values", "must be a nonempty list")
        if axis is SweepAxis.MODE:
            values = [_integer(v, f"sweep.values[{i}]") for i, v in enumerate(values)]
        else:
            values = [_number(v, f"sweep.values[{i}]") for i, v in enumerate(values)]
    else:
        log = _check_keys(
            section["logspace"], "sweep.logspace", ("start", "stop", "num")
        )
        for key in ("start", "stop", "num"):
            if key not in log:
                raise ConfigValidationError(f"sweep.logspace.{key}", "is required")
        start = _number(log["start"], "sweep.logspace.start")
        stop = _number(log["stop"], "sweep.logspace.stop")
        num = _integer(log["num"], "sweep.logspace.num")
        values = numpy.geomspace(start, stop, num).tolist()
        prov.record("sweep.values", "logspace", "config")

    series = None
    if section.get("series") is not None:
        s = _check_keys(section["series"], "sweep.series", ("axis", "values"))
        try:
            series_axis = SweepAxis(s.get("axis"))
        except ValueError:
            raise ConfigValidationError("sweep.series.axis", "must be a sweep axis")
        if series_axis is axis:
            raise ConfigValidationError(
                "sweep.series.axis", "must differ from the sweep axis"
            )
        if series_axis is SweepAxis.MODE:
            raise ConfigValidationError(
                "sweep.series.axis", "cannot label series by mode"
            )
        svalues = s.get("values")
        if not isinstance(svalues, list) or len(svalues) == 0:
            raise ConfigValidationError(
                "sweep.series.values", "must be a nonempty list"
            )
        svalues = [
            _number(v, f"sweep.series.values[{i}]") for i, v in enumerate(svalues)
        ]
        series = {"axis": series_axis, "values": svalues}

    actuation = section.get("actuation_position")
    if actuation is not None:
        if axis is not SweepAxis.MODE:
            raise ConfigValidationError(
                "sweep.actuation_position", "only applies to mode sweeps"
            )
        actuation = _number(actuation, "sweep.actuation_position", allow_zero=True)
        if actuation > 1:
            raise ConfigValidationError(
                "sweep.actuation_position", "must be a fraction of the length"
            )
    return {
        "axis": axis,
        "values": values,
        "series": series,
        "actuation_position": actuation,
    }


def _load_optimize(section, geometry, prov):
    section = _check_keys(
        section,
        "optimize",
        (
            "length_range",
            "width_range",
            "thickness",
            "objective",
            "grid",
            "refine",
            "max_iterations",
            "constraints",
        ),
    )
    for key in ("length_range", "width_range"):
        if key not in section:
            raise ConfigValidationError(f"optimize.{key}", "is required")
    opt = {
        "length_range": _range(section["length_range"], "optimize.length_range"),
        "width_range": _range(section["width_range"], "optimize.width_range"),
    }
    thickness, _ = prov.take(section, "thickness", geometry.thickness, "optimize")
    opt["thickness"] = _number(thickness, "optimize.thickness")

    objective, _ = prov.take(
        section, "objective", Objective.MAX_Q_TOTAL.value, "optimize"
    )
    try:
        opt["objective"] = Objective(objective)
    except ValueError:
        choices = ", ".join(o.value for o in Objective)
        raise ConfigValidationError("optimize.objective", f"must be one of {choices}")

    grid, _ = prov.take(section, "grid", [32, 32], "optimize")
    if not isinstance(grid, list) or len(grid) != 2:
        raise ConfigValidationError("optimize.grid", "must be a [nL, nW] pair")
    opt["grid"] = tuple(
        _integer(n, f"optimize.grid[{i}]", minimum=2) for i, n in enumerate(grid)
    )

    refine, _ = prov.take(section, "refine", True, "optimize")
    if not isinstance(refine, bool):
        raise ConfigValidationError("optimize.refine", "must be true or false")
    opt["refine"] = refine

    iterations, _ = prov.take(section, "max_iterations", 200, "optimize")
    opt["max_iterations"] = _integer(iterations, "optimize.max_iterations")

    constraints = _check_keys(
        section.get("constraints"), "optimize.constraints", Constraint.kinds
    )
    opt["constraints"] = {
        k: _number(v, f"optimize.constraints.{k}") for k, v in constraints.items()
    }
    return opt


def load_config(path, database=None):
    """Load and validate a run configuration.

    Parameters
    ----------
    path : str
        Path to the YAML configuration.
    database : :class:`~cantileverq.MaterialDatabase`
        Database to look up materials and gas profiles in. Defaults to
        :meth:`MaterialDatabase.load`.

    Returns
    -------
    :class:`RunConfig`
        The validated configuration.

    Raises
    ------
    ConfigParseError
        If the file is not valid YAML.
    ConfigValidationError
        If a value is missing, unknown, or violates an invariant. The error
        names the offending field.

    """
    path = pathlib.Path(path)
    doc = read_yaml(path)
    if not isinstance(doc, dict):
        raise ConfigValidationError("<root>", "must be a mapping")
    _check_keys(doc, "", _sections)
    if database is None:
        database = MaterialDatabase.load()
    prov = Provenance()

    # material
    if "material" not in doc:
        raise ConfigValidationError("material", "is required")
    material, material_name = _load_material(doc["material"], database)
    prov.record("material", material_name, "config")

    # geometry
    section = _check_keys(
        doc.get("geometry"), "geometry", ("length", "width", "thickness")
    )
    dims = {}
    for key in ("length", "width", "thickness"):
        if key not in section:
            raise ConfigValidationError(f"geometry.{key}", "is required")
        dims[key] = _number(section[key], f"geometry.{key}")
    try:
        geometry = Geometry(**dims)
    except ValueError as e:
        raise ConfigValidationError("geometry", str(e))

    # gas
    section = _check_keys(
        doc.get("gas"),
        "gas",
        (
            "profile",
            "pressure",
            "temperature",
            "viscosity",
            "molar_mass",
            "molecule_diameter",
        ),
    )
    profile_name, _ = prov.take(section, "profile", "air", "gas")
    if profile_name not in database.gases:
        raise ConfigValidationError("gas.profile", f"unknown gas {profile_name!r}")
    pressure, _ = prov.take(section, "pressure", standard_pressure, "gas")
    temperature, _ = prov.take(section, "temperature", 300.0, "gas")
    overrides = {}
    for key in ("viscosity", "molar_mass", "molecule_diameter"):
        if section.get(key) is not None:
            overrides[key] = _number(section[key], f"gas.{key}")
            prov.record(f"gas.{key}", overrides[key], "config")
    profile = database.gas(profile_name)
    for key in ("viscosity", "molar_mass", "molecule_diameter"):
        if key not in overrides and key in profile:
            prov.record(f"gas.{key}", profile[key], f"profile:{profile_name}")
    gas = GasEnvironment.from_profile(
        profile,
        _number(pressure, "gas.pressure", allow_zero=True),
        _number(temperature, "gas.temperature"),
        **overrides,
    )

    # support-loss constants and mode
    table = dict(DEFAULT_SUPPORT_LOSS_CONSTANTS)
    section = doc.get("support_loss_constants")
    if section is not None:
        if not isinstance(section, dict):
            raise ConfigValidationError("support_loss_constants", "must be a mapping")
        for n, C in section.items():
            field = f"support_loss_constants.{n}"
            try:
                n = int(n)
            except (TypeError, ValueError):
                raise ConfigValidationError(field, "key must be a mode index")
            C = _number(C, field)
            try:
                ModeSpec(n, support_loss_constant=C)
            except ValueError as e:
                raise ConfigValidationError(field, str(e))
            table[n] = C
    for n, C in table.items():
        given = section is not None and (n in section or str(n) in section)
        prov.record(
            f"support_loss_constants.{n}", C, "config" if given else "default"
        )

    section = _check_keys(doc.get("mode"), "mode", ("index",))
    index, _ = prov.take(section, "index", 1, "mode")
    index = _integer(index, "mode.index")
    if index not in table:
        raise ConfigValidationError(
            "support_loss_constants", f"no constant configured for mode {index}"
        )
    mode = ModeSpec.from_table(index, table)

    # sphere model
    section = _check_keys(doc.get("sphere"), "sphere", ("radius", "radius_factor"))
    if section.get("radius") is not None and section.get("radius_factor") is not None:
        raise ConfigValidationError("sphere", "give either radius or radius_factor")
    if section.get("radius") is not None:
        sphere = SphereModel(radius=_number(section["radius"], "sphere.radius"))
        prov.record("sphere.radius", sphere.radius, "config")
    else:
        factor, _ = prov.take(section, "radius_factor", 0.5, "sphere")
        sphere = SphereModel(radius_factor=_number(factor, "sphere.radius_factor"))
    prov.record("sphere.rule", sphere.rule, "rule")
    prov.record("boundary_layer.rule", BOUNDARY_LAYER_RULE, "rule")
    prov.record("relaxation_time.rule", RELAXATION_TIME_RULE, "rule")

    # regime thresholds
    section = _check_keys(
        doc.get("regime"), "regime", ("knudsen_viscous", "knudsen_molecular")
    )
    kv, _ = prov.take(section, "knudsen_viscous", KNUDSEN_VISCOUS, "regime")
    km, _ = prov.take(section, "knudsen_molecular", KNUDSEN_MOLECULAR, "regime")
    kv = _number(kv, "regime.knudsen_viscous")
    km = _number(km, "regime.knudsen_molecular")
    if not kv < km:
        raise ConfigValidationError(
            "regime", "knudsen_viscous must be below knudsen_molecular"
        )

    # sensitivity and residual channel
    section = _check_keys(
        doc.get("sensitivity"), "sensitivity", ("frequency_resolution_factor",)
    )
    factor, _ = prov.take(section, "frequency_resolution_factor", 1.0, "sensitivity")
    factor = _number(factor, "sensitivity.frequency_resolution_factor")

    q_others = doc.get("q_others")
    if q_others is not None:
        q_others = _number(q_others, "q_others")
        prov.record("q_others", q_others, "config")

    # run stanzas
    sweep = None
    if doc.get("sweep") is not None:
        sweep = _load_sweep(doc["sweep"], prov)
    optimize = None
    if doc.get("optimize") is not None:
        optimize = _load_optimize(doc["optimize"], geometry, prov)

    section = _check_keys(doc.get("output"), "output", ("directory", "name"))
    directory, _ = prov.take(section, "directory", ".", "output")
    name, _ = prov.take(section, "name", path.stem, "output")

    config = RunConfig(
        path=path,
        material=material,
        geometry=geometry,
        gas=gas,
        mode=mode,
        support_loss_constants=table,
        sphere=sphere,
        knudsen_viscous=kv,
        knudsen_molecular=km,
        frequency_resolution_factor=factor,
        q_others=q_others,
        sweep=sweep,
        optimize=optimize,
        output_directory=pathlib.Path(str(directory)),
        output_name=str(name),
        provenance=prov,
    )

    # check that the stanzas can be built before anything runs
    if sweep is not None:
        try:
            config.sweep_spec()
        except ValueError as e:
            raise ConfigValidationError("sweep.values", str(e))
    if optimize is not None:
        try:
            config.design_space()
        except ValueError as e:
            raise ConfigValidationError("optimize", str(e))

    logger.info("Loaded %s with defaults: %s", path, ", ".join(prov.defaults()))
    return config
