import collections.abc
import importlib.resources
import os

import yaml

from . import _compatibility
from .errors import ConfigParseError, ConfigValidationError
from .material import Material

#: Environment variable that overrides the path of the material database.
DATABASE_ENV = "CANTILEVERQ_MATERIALS"

_gas_fields = ("viscosity", "molar_mass", "molecule_diameter")


def read_yaml(path):
    """Read a YAML document.

    Parameters
    ----------
    path : str
        Path to the file.

    Returns
    -------
    object
        The parsed document, or an empty dict for an empty file.

    Raises
    ------
    ConfigParseError
        If the document is not valid YAML. The error carries the 1-based line
        and column of the problem.

    """
    with open(path, encoding="utf-8") as f:
        try:
            doc = yaml.load(f, Loader=_compatibility.yaml_safe_loader)
        except yaml.MarkedYAMLError as e:
            mark = e.problem_mark or e.context_mark
            line = column = None
            if mark is not None:
                line = mark.line + 1
                column = mark.column + 1
            raise ConfigParseError(
                f"{path}: {e.problem or e.context}", line=line, column=column
            )
        except yaml.YAMLError as e:
            raise ConfigParseError(f"{path}: {e}")
    return {} if doc is None else doc


class MaterialDatabase(collections.abc.Mapping):
    """Named beam materials and gas profiles.

    The database maps material names to :class:`~cantileverq.Material`. It
    also holds gas profiles, which supply the viscosity, molar mass, and
    molecule diameter of a gas, and a free-text source note for every entry.

    Parameters
    ----------
    materials : dict
        Map of names to materials.
    gases : dict
        Map of names to gas profiles.
    notes : dict
        Map of entry names to source notes.

    """

    def __init__(self, materials=None, gases=None, notes=None):
        self._materials = {}
        self._gases = {}
        self._notes = {}
        if materials is not None:
            for name, material in materials.items():
                if not isinstance(material, Material):
                    raise TypeError("Database entries must be Material objects")
                self._materials[name] = material
        if gases is not None:
            for name, profile in gases.items():
                self._gases[name] = dict(profile)
        if notes is not None:
            self._notes.update(notes)

    @classmethod
    def default_path(cls):
        """str: Path of the database to load when none is given.

        The path is read from the ``CANTILEVERQ_MATERIALS`` environment
        variable if it is set, otherwise the database shipped with the package
        is used.

        """
        path = os.environ.get(DATABASE_ENV)
        if path:
            return path
        return str(importlib.resources.files("cantileverq") / "data" / "materials.yaml")

    @classmethod
    def load(cls, path=None):
        """Load a database from YAML.

        Parameters
        ----------
        path : str
            Path to the database. Defaults to :meth:`default_path`.

        Returns
        -------
        :class:`MaterialDatabase`
            The database.

        Raises
        ------
        ConfigParseError
            If the file is not valid YAML.
        ConfigValidationError
            If an entry is invalid.

        """
        if path is None:
            path = cls.default_path()
        doc = read_yaml(path)
        if not isinstance(doc, dict):
            raise ConfigValidationError("<root>", "must be a mapping")
        unknown = set(doc) - {"materials", "gases"}
        if unknown:
            raise ConfigValidationError(sorted(unknown)[0], "unknown key")

        materials = {}
        gases = {}
        notes = {}
        for name, entry in (doc.get("materials") or {}).items():
            field = f"materials.{name}"
            if not isinstance(entry, dict):
                raise ConfigValidationError(field, "must be a mapping")
            entry = dict(entry)
            if "source" in entry:
                notes[name] = str(entry.pop("source")).strip()
            try:
                materials[name] = Material.from_dict(name, entry)
            except (TypeError, ValueError) as e:
                raise ConfigValidationError(field, str(e))

        for name, entry in (doc.get("gases") or {}).items():
            field = f"gases.{name}"
            if not isinstance(entry, dict):
                raise ConfigValidationError(field, "must be a mapping")
            entry = dict(entry)
            if "source" in entry:
                notes[name] = str(entry.pop("source")).strip()
            profile = {"name": name}
            for key, value in entry.items():
                if key not in _gas_fields:
                    raise ConfigValidationError(f"{field}.{key}", "unknown key")
                try:
                    v = float(value)
                except (TypeError, ValueError):
                    raise ConfigValidationError(f"{field}.{key}", "must be a number")
                if not v > 0:
                    raise ConfigValidationError(f"{field}.{key}", "must be positive")
                profile[key] = v
            for key in ("viscosity", "molar_mass"):
                if key not in profile:
                    raise ConfigValidationError(f"{field}.{key}", "is required")
            gases[name] = profile

        return cls(materials, gases, notes)

    def __getitem__(self, key):
        return self._materials[key]

    def __iter__(self):
        return iter(self._materials)

    def __len__(self):
        return len(self._materials)

    @property
    def gases(self):
        """tuple: Names of the gas profiles."""
        return tuple(self._gases.keys())

    def gas(self, name):
        """Gas profile by name.

        Parameters
        ----------
        name : str
            Name of the gas.

        Returns
        -------
        dict
            Copy of the profile.

        """
        return dict(self._gases[name])

    def source_note(self, name):
        """Source note of a material or gas, or an empty string."""
        return self._notes.get(name, "")
