import numpy


class Material:
    """Beam material.

    A material holds the elastic and thermal properties of the vibrating beam.
    The elastic properties (``youngs_modulus`` and ``density``) are always
    required. The thermal properties are only needed to evaluate thermoelastic
    loss, and they may be ``None`` otherwise.

    A thin-film ``coating`` (for example, an Au/Cr electrode) can be described
    by name. It does not change the stiffness or mass of the beam; any loss it
    causes is treated as a residual dissipation channel.

    Parameters
    ----------
    name : str
        Identifier of the material.
    youngs_modulus : float
        Young's modulus *E* (Pa).
    density : float
        Mass density *ρ* (kg/m³).
    thermal_expansion : float
        Linear thermal expansion coefficient *α* (1/K).
    heat_capacity_volumetric : float
        Volumetric heat capacity *C_V* (J/(m³·K)).
    thermal_conductivity : float
        Thermal conductivity *κ* (W/(m·K)).
    coating : str
        Descriptor of a coating layer.

    Example
    -------
    Silicon with its thermal properties::

        si = cantileverq.Material(
            "silicon",
            youngs_modulus=169e9,
            density=2330,
            thermal_expansion=2.6e-6,
            heat_capacity_volumetric=1.631e6,
            thermal_conductivity=148,
        )

    """

    _thermal_fields = (
        "thermal_expansion",
        "heat_capacity_volumetric",
        "thermal_conductivity",
    )

    def __init__(
        self,
        name,
        youngs_modulus,
        density,
        thermal_expansion=None,
        heat_capacity_volumetric=None,
        thermal_conductivity=None,
        coating=None,
    ):
        self.name = name
        self.youngs_modulus = youngs_modulus
        self.density = density
        self.thermal_expansion = thermal_expansion
        self.heat_capacity_volumetric = heat_capacity_volumetric
        self.thermal_conductivity = thermal_conductivity
        self.coating = coating

    @staticmethod
    def _check_positive(value, name, optional=False):
        if value is None:
            if optional:
                return None
            raise TypeError(f"{name} is required")
        try:
            v = float(value)
        except (TypeError, ValueError):
            raise TypeError(f"{name} must be a number")
        if not numpy.isfinite(v) or v <= 0:
            raise ValueError(f"{name} must be positive")
        return v

    @property
    def name(self):
        """str: Identifier of the material."""
        return self._name

    @name.setter
    def name(self, value):
        if not isinstance(value, str) or len(value) == 0:
            raise TypeError("Material name must be a nonempty string")
        self._name = value

    @property
    def youngs_modulus(self):
        """float: Young's modulus *E*."""
        return self._youngs_modulus

    @youngs_modulus.setter
    def youngs_modulus(self, value):
        self._youngs_modulus = self._check_positive(value, "Young's modulus")

    @property
    def density(self):
        """float: Mass density *ρ*."""
        return self._density

    @density.setter
    def density(self, value):
        self._density = self._check_positive(value, "Density")

    @property
    def thermal_expansion(self):
        """float: Thermal expansion coefficient *α*."""
        return self._thermal_expansion

    @thermal_expansion.setter
    def thermal_expansion(self, value):
        self._thermal_expansion = self._check_positive(
            value, "Thermal expansion", optional=True
        )

    @property
    def heat_capacity_volumetric(self):
        """float: Volumetric heat capacity *C_V*."""
        return self._heat_capacity_volumetric

    @heat_capacity_volumetric.setter
    def heat_capacity_volumetric(self, value):
        self._heat_capacity_volumetric = self._check_positive(
            value, "Heat capacity", optional=True
        )

    @property
    def thermal_conductivity(self):
        """float: Thermal conductivity *κ*."""
        return self._thermal_conductivity

    @thermal_conductivity.setter
    def thermal_conductivity(self, value):
        self._thermal_conductivity = self._check_positive(
            value, "Thermal conductivity", optional=True
        )

    @property
    def coating(self):
        """str: Coating descriptor, or ``None``."""
        return self._coating

    @coating.setter
    def coating(self, value):
        if value is not None and not isinstance(value, str):
            raise TypeError("Coating must be a string")
        self._coating = value

    def has_thermal_data(self):
        """Check if thermoelastic loss can be evaluated.

        Returns
        -------
        bool
            True if all thermal properties are set.

        """
        return all(getattr(self, f) is not None for f in self._thermal_fields)

    def missing_thermal_fields(self):
        """list of str: Names of the thermal properties that are not set."""
        return [f for f in self._thermal_fields if getattr(self, f) is None]

    @classmethod
    def from_dict(cls, name, data):
        """Create a material from a mapping of properties.

        Parameters
        ----------
        name : str
            Identifier of the material.
        data : dict
            Material properties keyed by the constructor argument names.

        Returns
        -------
        :class:`Material`
            The material.

        """
        return cls(name, **data)

    def to_dict(self):
        """Convert to a mapping of property names to values."""
        return {
            "name": self._name,
            "youngs_modulus": self._youngs_modulus,
            "density": self._density,
            "thermal_expansion": self._thermal_expansion,
            "heat_capacity_volumetric": self._heat_capacity_volumetric,
            "thermal_conductivity": self._thermal_conductivity,
            "coating": self._coating,
        }

    def __eq__(self, other):
        if not isinstance(other, Material):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return (
            f"Material({self._name!r}, youngs_modulus={self._youngs_modulus!r}, "
            f"density={self._density!r})"
        )
