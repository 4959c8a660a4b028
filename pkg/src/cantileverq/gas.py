import math

import scipy.constants

#: Universal gas constant (J/(mol·K)).
gas_constant = scipy.constants.R

#: Boltzmann constant (J/K).
boltzmann_constant = scipy.constants.k

#: Standard atmosphere (Pa).
standard_pressure = scipy.constants.atm


def _positive(value, name, allow_zero=False):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise TypeError(f"{name} must be a number")
    if not math.isfinite(v) or v < 0 or (v == 0 and not allow_zero):
        if allow_zero:
            raise ValueError(f"{name} must be nonnegative")
        raise ValueError(f"{name} must be positive")
    return v


class GasEnvironment:
    """State of the gas surrounding the cantilever.

    Parameters
    ----------
    pressure : float
        Pressure *P* (Pa). Zero is allowed and means vacuum.
    temperature : float
        Temperature *T* (K). This is also the ambient temperature used for
        thermoelastic loss.
    viscosity : float
        Dynamic viscosity *μ* (Pa·s).
    molar_mass : float
        Molar mass *M* (kg/mol).
    molecule_diameter : float
        Kinetic diameter *d* of a gas molecule (m), used for the mean free path.
    name : str
        Name of the gas.

    """

    def __init__(
        self,
        pressure,
        temperature,
        viscosity,
        molar_mass,
        molecule_diameter=3.7e-10,
        name="air",
    ):
        self._pressure = _positive(pressure, "Pressure", allow_zero=True)
        self._temperature = _positive(temperature, "Temperature")
        self._viscosity = _positive(viscosity, "Viscosity")
        self._molar_mass = _positive(molar_mass, "Molar mass")
        self._molecule_diameter = _positive(molecule_diameter, "Molecule diameter")
        if not isinstance(name, str):
            raise TypeError("Gas name must be a string")
        self._name = name

    @classmethod
    def from_profile(cls, profile, pressure, temperature, **overrides):
        """Create a gas environment from a gas profile.

        Parameters
        ----------
        profile : dict
            Gas properties with keys ``viscosity``, ``molar_mass``, and
            (optionally) ``molecule_diameter`` and ``name``.
        pressure : float
            Pressure (Pa).
        temperature : float
            Temperature (K).
        overrides
            Values that replace the profile properties. ``None`` values are
            ignored.

        Returns
        -------
        :class:`GasEnvironment`
            The gas environment.

        """
        props = {
            k: profile[k]
            for k in ("viscosity", "molar_mass", "molecule_diameter", "name")
            if k in profile
        }
        props.update({k: v for k, v in overrides.items() if v is not None})
        return cls(pressure=pressure, temperature=temperature, **props)

    @property
    def pressure(self):
        """float: Pressure *P*."""
        return self._pressure

    @property
    def temperature(self):
        """float: Temperature *T*."""
        return self._temperature

    @property
    def viscosity(self):
        """float: Dynamic viscosity *μ*."""
        return self._viscosity

    @property
    def molar_mass(self):
        """float: Molar mass *M*."""
        return self._molar_mass

    @property
    def molecule_diameter(self):
        """float: Kinetic diameter of a molecule."""
        return self._molecule_diameter

    @property
    def name(self):
        """str: Name of the gas."""
        return self._name

    @property
    def gas_constant(self):
        """float: Universal gas constant."""
        return gas_constant

    @property
    def density(self):
        """float: Ideal-gas mass density *P M / (R T)*."""
        return self._pressure * self._molar_mass / (gas_constant * self._temperature)

    @property
    def mean_free_path(self):
        """float: Mean free path of a molecule.

        The mean free path is infinite in vacuum.

        """
        if self._pressure == 0:
            return math.inf
        return (
            boltzmann_constant
            * self._temperature
            / (math.sqrt(2) * math.pi * self._molecule_diameter**2 * self._pressure)
        )

    def knudsen_number(self, length):
        """Knudsen number for a characteristic length.

        Parameters
        ----------
        length : float
            Characteristic length (m).

        Returns
        -------
        float
            Ratio of the mean free path to ``length``.

        """
        return self.mean_free_path / length

    def replace(self, **kwargs):
        """Copy the environment with some properties changed.

        Parameters
        ----------
        kwargs
            Constructor arguments to change.

        Returns
        -------
        :class:`GasEnvironment`
            The new environment.

        """
        props = self.to_dict()
        props.update(kwargs)
        return GasEnvironment(**props)

    def to_dict(self):
        """Convert to a mapping of property names to values."""
        return {
            "pressure": self._pressure,
            "temperature": self._temperature,
            "viscosity": self._viscosity,
            "molar_mass": self._molar_mass,
            "molecule_diameter": self._molecule_diameter,
            "name": self._name,
        }

    def __eq__(self, other):
        if not isinstance(other, GasEnvironment):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(self.to_dict().items()))

    def __repr__(self):
        return (
            f"GasEnvironment(pressure={self._pressure!r}, "
            f"temperature={self._temperature!r}, name={self._name!r})"
        )


class SphereModel:
    """Oscillating-sphere approximation of the beam in a viscous gas.

    The effective sphere radius *R* is either set explicitly or scaled from the
    beam width as ``radius_factor * width``. The boundary-layer thickness is
    derived for each operating point.

    Parameters
    ----------
    radius : float
        Explicit effective radius (m). If ``None``, the radius scales with the
        width.
    radius_factor : float
        Ratio of the effective radius to the width, used when ``radius`` is
        ``None``.

    """

    def __init__(self, radius=None, radius_factor=0.5):
        self._radius = None if radius is None else _positive(radius, "Sphere radius")
        self._radius_factor = _positive(radius_factor, "Radius factor")

    @property
    def radius(self):
        """float: Explicit effective radius, or ``None``."""
        return self._radius

    @property
    def radius_factor(self):
        """float: Ratio of effective radius to width."""
        return self._radius_factor

    @property
    def rule(self):
        """str: Description of how the radius is chosen."""
        if self._radius is not None:
            return f"R = {self._radius!r} m"
        return f"R = {self._radius_factor!r} * W"

    def radius_for(self, geometry):
        """Effective radius for a geometry.

        Parameters
        ----------
        geometry : :class:`~cantileverq.Geometry`
            Beam geometry.

        Returns
        -------
        float
            Effective sphere radius *R*.

        """
        if self._radius is not None:
            return self._radius
        return self._radius_factor * geometry.width

    @staticmethod
    def boundary_layer_thickness(gas, angular_frequency):
        """Thickness of the oscillatory viscous boundary layer.

        The thickness is ``sqrt(2 μ / (ρ_gas ω))``, which is infinite in vacuum.

        Parameters
        ----------
        gas : :class:`GasEnvironment`
            Gas state.
        angular_frequency : float
            Angular frequency *ω* (rad/s).

        Returns
        -------
        float
            Boundary-layer thickness *δ*.

        """
        rho = gas.density
        if rho == 0:
            return math.inf
        return math.sqrt(2 * gas.viscosity / (rho * angular_frequency))

    def __eq__(self, other):
        if not isinstance(other, SphereModel):
            return NotImplemented
        return (self._radius, self._radius_factor) == (
            other._radius,
            other._radius_factor,
        )

    def __hash__(self):
        return hash((self._radius, self._radius_factor))

    def __repr__(self):
        return (
            f"SphereModel(radius={self._radius!r}, "
            f"radius_factor={self._radius_factor!r})"
        )
