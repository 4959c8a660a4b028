"""Command-line interface.

Exit status is 0 on success, 1 for invalid input (usage, configuration, or
files), and 2 when a computation fails.

"""

import argparse
import logging
import math
import sys

from . import __version__
from .config import load_config
from .database import MaterialDatabase
from .errors import ComputationError, ConfigError, ConfigValidationError
from .explorer import (
    SweepAxis,
    mode_sweep,
    mode_sweep_series,
    optimize_geometry,
    run_sweep,
    run_sweep_series,
)
from .files import SweepFile, TableFile, TraceFile, format_json, write_json
from .modes import ModeSpec, mode_shape_nodes
from .response import PeakMethod, extract_residual_q, fit_half_power, fit_lorentzian

logger = logging.getLogger(__name__)


class UsageError(Exception):
    """Invalid command line."""

    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _print(record):
    print(format_json(record))


def _provenance_record(config):
    return {
        "version": __version__,
        "config": str(config.path),
        "material": config.material.to_dict(),
        "geometry": config.geometry.to_dict(),
        "gas": config.gas.to_dict(),
        "mode": config.mode.index,
        "provenance": config.provenance.to_dict(),
    }


def _point(args):
    config = load_config(args.config)
    budget = config.operating_point().evaluate()
    record = {
        "material": config.material.name,
        "geometry": config.geometry.to_dict(),
        "pressure": config.gas.pressure,
        "mode": config.mode.index,
    }
    record.update(budget.to_dict())
    if args.measured_q is not None:
        q_others = extract_residual_q(args.measured_q, budget)
        record["measured_q"] = args.measured_q
        record["q_others_extracted"] = q_others
        record["q_others_share"] = (
            0.0 if math.isinf(q_others) else args.measured_q / q_others
        )
    _print(record)


def _sweep(args):
    config = load_config(args.config)
    if config.sweep is None:
        raise ConfigValidationError("sweep", "is required for the sweep command")
    sweep = config.sweep
    if sweep["axis"] is SweepAxis.MODE:
        inputs = (
            config.geometry,
            config.material,
            config.gas,
            sweep["values"],
            config.support_loss_constants,
        )
        kwargs = dict(
            sphere=config.sphere,
            actuation_position=sweep["actuation_position"],
            q_others=config.q_others,
            knudsen_viscous=config.knudsen_viscous,
            knudsen_molecular=config.knudsen_molecular,
            frequency_resolution_factor=config.frequency_resolution_factor,
        )
        if sweep["series"] is not None:
            rows = mode_sweep_series(
                *inputs,
                sweep["series"]["axis"],
                sweep["series"]["values"],
                **kwargs,
            )
        else:
            rows = mode_sweep(*inputs, **kwargs)
    elif sweep["series"] is not None:
        rows = run_sweep_series(
            config.sweep_spec(),
            sweep["series"]["axis"],
            sweep["series"]["values"],
            workers=args.workers,
        )
    else:
        rows = run_sweep(config.sweep_spec(), workers=args.workers)

    config.output_directory.mkdir(parents=True, exist_ok=True)
    outputs = [config.output_path("sweep.csv"), config.output_path("sweep.json")]
    for filename in outputs:
        TableFile.create(filename, rows)
    provenance = config.output_path("provenance.json")
    write_json(provenance, _provenance_record(config))
    outputs.append(provenance)
    for filename in outputs:
        logger.info("Wrote %s", filename)
    _print({"rows": len(rows), "files": [str(f) for f in outputs]})


def _optimize(args):
    config = load_config(args.config)
    if config.optimize is None:
        raise ConfigValidationError("optimize", "is required for the optimize command")
    space = config.design_space()
    geometry, budget, trace = optimize_geometry(space)

    record = {
        "objective": space.objective.value,
        "value": space.objective.measure(budget),
        "geometry": geometry.to_dict(),
        "budget": budget.to_dict(),
        "constraints": {c.kind: c.value for c in space.constraints},
        "evaluations": len(trace),
    }
    config.output_directory.mkdir(parents=True, exist_ok=True)
    optimum = config.output_path("optimum.json")
    write_json(optimum, record)
    trace_file = config.output_path("trace.jsonl")
    TraceFile.create(trace_file, trace)
    provenance = config.output_path("provenance.json")
    write_json(provenance, _provenance_record(config))
    record["files"] = [str(optimum), str(trace_file), str(provenance)]
    _print(record)


def _fit(args):
    sweep = SweepFile(args.sweep).read()
    if PeakMethod(args.method) is PeakMethod.HALF_POWER:
        fit = fit_half_power(sweep, baseline=args.baseline)
    else:
        initial = fit_half_power(sweep, baseline=args.baseline)
        fit = fit_lorentzian(sweep, initial=initial, max_iterations=args.max_iterations)
    _print(fit.to_dict())


def _nodes(args):
    mode = ModeSpec(args.mode)
    _print(
        {
            "mode": mode.index,
            "eigenvalue": mode.eigenvalue,
            "nodes": mode_shape_nodes(mode),
        }
    )


def _materials(args):
    database = MaterialDatabase.load(args.database)
    for name in database:
        material = database[name]
        line = (
            f"{name}: E = {material.youngs_modulus:g} Pa, "
            f"rho = {material.density:g} kg/m^3"
        )
        if not material.has_thermal_data():
            line += " (no thermal data)"
        note = database.source_note(name)
        if note:
            line += f" [{note}]"
        print(line)
    for name in database.gases:
        profile = database.gas(name)
        line = (
            f"{name} (gas): mu = {profile['viscosity']:g} Pa s, "
            f"M = {profile['molar_mass']:g} kg/mol"
        )
        note = database.source_note(name)
        if note:
            line += f" [{note}]"
        print(line)


def _make_parser():
    parser = _ArgumentParser(
        prog="cantileverq",
        description="Quality-factor models for resonant microcantilevers.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress (repeat for debug output)",
    )
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    p = commands.add_parser("point", help="evaluate the budget of one configuration")
    p.add_argument("config", help="YAML run configuration")
    p.add_argument(
        "--measured-q",
        type=float,
        default=None,
        help="measured Q to extract the unmodeled residual channel from",
    )
    p.set_defaults(run=_point)

    p = commands.add_parser("sweep", help="run the configured sweep")
    p.add_argument("config", help="YAML run configuration")
    p.add_argument("--workers", type=int, default=None, help="threads per sweep")
    p.set_defaults(run=_sweep)

    p = commands.add_parser("optimize", help="optimize the cantilever geometry")
    p.add_argument("config", help="YAML run configuration")
    p.set_defaults(run=_optimize)

    p = commands.add_parser("fit", help="fit the resonance peak of a sweep file")
    p.add_argument("sweep", help="sweep CSV file")
    p.add_argument(
        "--method",
        choices=[m.value for m in PeakMethod],
        default=PeakMethod.LORENTZIAN_LS.value,
        help="peak extraction method",
    )
    p.add_argument("--baseline", type=float, default=0.0, help="amplitude baseline")
    p.add_argument("--max-iterations", type=int, default=200)
    p.set_defaults(run=_fit)

    p = commands.add_parser("nodes", help="print the node points of a mode")
    p.add_argument("mode", type=int, help="mode index")
    p.set_defaults(run=_nodes)

    p = commands.add_parser("materials", help="list the material database")
    p.add_argument("--database", default=None, help="path to a material database")
    p.set_defaults(run=_materials)

    return parser


def main(argv=None):
    """Run the command-line interface.

    Parameters
    ----------
    argv : list of str
        Arguments, not including the program name. Defaults to
        ``sys.argv[1:]``.

    Returns
    -------
    int
        Exit status.

    """
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"cantileverq: error: {e}", file=sys.stderr)
        return 1

    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s:%(name)s: %(message)s"
    )
    logging.getLogger("cantileverq").setLevel(level)
    logging.captureWarnings(True)
    try:
        args.run(args)
    except ComputationError as e:
        print(f"cantileverq: computation failed: {e}", file=sys.stderr)
        return 2
    except (ConfigError, OSError, TypeError, ValueError) as e:
        print(f"cantileverq: error: {e}", file=sys.stderr)
        return 1
    finally:
        logging.captureWarnings(False)
    return 0


if __name__ == "__main__":
    sys.exit(main())
