"""Beam dynamics and dissipation models.

Each dissipation channel is characterized by its own quality factor, and the
channels combine as a harmonic sum: the composite dissipation ``1/Q`` is the
sum of the channel dissipations ``1/Q_i``. A channel that dissipates no energy
has an infinite quality factor, :data:`LOSSLESS`.

"""

import enum
import math

from .errors import (
    EmptyChannelListError,
    MissingModeConstantError,
    MissingThermalDataError,
    ZeroPressureError,
)

#: Quality factor of a channel that dissipates no energy.
LOSSLESS = math.inf

#: Knudsen number at or below which the gas is treated as a continuum.
KNUDSEN_VISCOUS = 0.01

#: Knudsen number at or above which the gas is treated as free molecules.
KNUDSEN_MOLECULAR = 10.0


class Regime(str, enum.Enum):
    """Gas-damping regime."""

    VISCOUS = "viscous"
    MOLECULAR = "molecular"
    TRANSITION = "transition"


def resonant_frequency(geometry, material, mode):
    """Resonant frequency of a flexural mode.

    Parameters
    ----------
    geometry : :class:`~cantileverq.Geometry`
        Beam geometry.
    material : :class:`~cantileverq.Material`
        Beam material.
    mode : :class:`~cantileverq.ModeSpec`
        Mode.

    Returns
    -------
    float
        Frequency ``f_n = k_n² / (2π) · t / L² · sqrt(E / (12 ρ))`` (Hz).

    """
    k = mode.eigenvalue
    return (
        k**2
        / (2 * math.pi)
        * geometry.thickness
        / geometry.length**2
        * math.sqrt(material.youngs_modulus / (12 * material.density))
    )


def beam_mass(geometry, material):
    """Mass *m0* of the beam (kg)."""
    return material.density * geometry.volume


def _sqrt_rho_e(material):
    return math.sqrt(material.density * material.youngs_modulus)


def q_air_viscous(geometry, material, gas, mode, sphere):
    """Quality factor for air damping in the viscous regime.

    The beam is approximated by a sphere of effective radius *R* oscillating
    in a viscous gas with boundary-layer thickness *δ*::

        Q = k² / (12 π √3) · sqrt(ρ E) · W t² / (L R (1 + R/δ) μ)

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
        Sphere approximation.

    Returns
    -------
    float
        Quality factor.

    Raises
    ------
    ZeroPressureError
        If the pressure is zero.

    """
    if gas.pressure == 0:
        raise ZeroPressureError("Viscous air damping is undefined at zero pressure")
    omega = 2 * math.pi * resonant_frequency(geometry, material, mode)
    delta = sphere.boundary_layer_thickness(gas, omega)
    R = sphere.radius_for(geometry)
    k = mode.eigenvalue
    return (
        k**2
        / (12 * math.pi * math.sqrt(3))
        * _sqrt_rho_e(material)
        * geometry.width
        * geometry.thickness**2
        / (geometry.length * R * (1 + R / delta) * gas.viscosity)
    )


def q_air_molecular(geometry, material, gas, mode):
    """Quality factor for air damping in the molecular regime.

    Momentum is transferred by independent collisions of gas molecules with
    the beam::

        Q = sqrt(3π/128) · sqrt(R_gas T / M) · k² · sqrt(ρ E) · t² / L² / P

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

    Returns
    -------
    float
        Quality factor.

    Raises
    ------
    ZeroPressureError
        If the pressure is zero.

    """
    if gas.pressure == 0:
        raise ZeroPressureError("Molecular air damping is undefined at zero pressure")
    k = mode.eigenvalue
    return (
        math.sqrt(3 * math.pi / 128)
        * math.sqrt(gas.gas_constant * gas.temperature / gas.molar_mass)
        * k**2
        * _sqrt_rho_e(material)
        * (geometry.thickness / geometry.length) ** 2
        / gas.pressure
    )


def q_air(
    geometry,
    material,
    gas,
    mode,
    sphere,
    knudsen_viscous=KNUDSEN_VISCOUS,
    knudsen_molecular=KNUDSEN_MOLECULAR,
):
    """Quality factor for air damping in any regime.

    The regime is chosen by the Knudsen number ``Kn`` of the beam width. The
    viscous model applies for ``Kn <= knudsen_viscous`` and the molecular model
    applies for ``Kn >= knudsen_molecular``. In between, ``log Q`` is
    interpolated linearly in ``log Kn`` between the two models so that the
    quality factor is continuous in pressure.

    In vacuum, the air channel is :data:`LOSSLESS` in the molecular regime.

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
        Sphere approximation for the viscous regime.
    knudsen_viscous : float
        Upper Knudsen number of the viscous regime.
    knudsen_molecular : float
        Lower Knudsen number of the molecular regime.

    Returns
    -------
    tuple
        Quality factor and :class:`Regime`.

    """
    if not 0 < knudsen_viscous < knudsen_molecular:
        raise ValueError("Knudsen thresholds must satisfy 0 < viscous < molecular")
    if gas.pressure == 0:
        return LOSSLESS, Regime.MOLECULAR

    Kn = gas.knudsen_number(geometry.width)
    if Kn <= knudsen_viscous:
        return q_air_viscous(geometry, material, gas, mode, sphere), Regime.VISCOUS
    elif Kn >= knudsen_molecular:
        return q_air_molecular(geometry, material, gas, mode), Regime.MOLECULAR

    q_visc = q_air_viscous(geometry, material, gas, mode, sphere)
    q_mol = q_air_molecular(geometry, material, gas, mode)
    w = math.log(Kn / knudsen_viscous) / math.log(knudsen_molecular / knudsen_viscous)
    q = math.exp((1 - w) * math.log(q_visc) + w * math.log(q_mol))
    return q, Regime.TRANSITION


def q_support(geometry, mode):
    """Quality factor for support loss.

    Elastic waves radiated into the support give ``Q = C (L/t)³``.

    Parameters
    ----------
    geometry : :class:`~cantileverq.Geometry`
        Beam geometry.
    mode : :class:`~cantileverq.ModeSpec`
        Mode with a support-loss constant.

    Returns
    -------
    float
        Quality factor.

    Raises
    ------
    MissingModeConstantError
        If the mode has no support-loss constant.

    """
    if not mode.has_support_loss_constant():
        raise MissingModeConstantError(
            f"No support-loss constant configured for mode {mode.index}"
        )
    return mode.support_loss_constant * geometry.aspect_ratio**3


def _require_thermal_data(material):
    if not material.has_thermal_data():
        missing = ", ".join(material.missing_thermal_fields())
        raise MissingThermalDataError(
            f"Material {material.name!r} is missing thermal data: {missing}"
        )


def relaxation_time(geometry, material):
    """Thermal relaxation time across the beam thickness.

    The relaxation time of the first thermal mode is ``τ = t² C_V / (π² κ)``.

    Parameters
    ----------
    geometry : :class:`~cantileverq.Geometry`
        Beam geometry.
    material : :class:`~cantileverq.Material`
        Beam material with thermal data.

    Returns
    -------
    float
        Relaxation time (s).

    """
    _require_thermal_data(material)
    return (
        geometry.thickness**2
        * material.heat_capacity_volumetric
        / (math.pi**2 * material.thermal_conductivity)
    )


def q_ted(geometry, material, frequency, ambient_temperature):
    """Quality factor for thermoelastic loss.

    Parameters
    ----------
    geometry : :class:`~cantileverq.Geometry`
        Beam geometry.
    material : :class:`~cantileverq.Material`
        Beam material with thermal data.
    frequency : float
        Vibration frequency (Hz).
    ambient_temperature : float
        Ambient temperature (K).

    Returns
    -------
    float
        ``Q = C_V / (E α² T) · (1 + (ωτ)²) / (ωτ)``.

    Raises
    ------
    MissingThermalDataError
        If the material is missing thermal data.

    """
    _require_thermal_data(material)
    if not frequency > 0:
        raise ValueError("Frequency must be positive")
    if not ambient_temperature > 0:
        raise ValueError("Temperature must be positive")
    x = 2 * math.pi * frequency * relaxation_time(geometry, material)
    strength = (
        material.youngs_modulus
        * material.thermal_expansion**2
        * ambient_temperature
        / material.heat_capacity_volumetric
    )
    return (1 + x**2) / x / strength


class QBudget:
    """Quality factors of the dissipation channels at one operating point.

    Channels are identified by label. The standard labels are ``air``,
    ``support``, ``ted``, and ``others``; any other labels are kept as-is.

    Parameters
    ----------
    channels : dict
        Quality factor of each channel, in order.
    q_total : float
        Composite quality factor.
    regime : :class:`Regime`
        Gas-damping regime of the air channel.
    resonant_frequency : float
        Resonant frequency (Hz).
    effective_mass : float
        Mass *m0* of the resonator (kg).
    minimum_detectable_mass : float
        Smallest resolvable loaded mass (kg).

    """

    _standard_channels = ("air", "support", "ted", "others")

    def __init__(
        self,
        channels,
        q_total,
        regime=None,
        resonant_frequency=None,
        effective_mass=None,
        minimum_detectable_mass=None,
    ):
        self._channels = dict(channels)
        self._q_total = q_total
        self._regime = None if regime is None else Regime(regime)
        self._resonant_frequency = resonant_frequency
        self._effective_mass = effective_mass
        self._minimum_detectable_mass = minimum_detectable_mass

    @property
    def channels(self):
        """dict: Quality factor of each channel (copy)."""
        return dict(self._channels)

    @property
    def q_air(self):
        """float: Air-damping quality factor, or ``None``."""
        return self._channels.get("air")

    @property
    def q_support(self):
        """float: Support-loss quality factor, or ``None``."""
        return self._channels.get("support")

    @property
    def q_ted(self):
        """float: Thermoelastic quality factor, or ``None``."""
        return self._channels.get("ted")

    @property
    def q_others(self):
        """float: Residual quality factor, or ``None``."""
        return self._channels.get("others")

    @property
    def q_total(self):
        """float: Composite quality factor."""
        return self._q_total

    @property
    def regime(self):
        """:class:`Regime`: Gas-damping regime, or ``None``."""
        return self._regime

    @property
    def resonant_frequency(self):
        """float: Resonant frequency, or ``None``."""
        return self._resonant_frequency

    @property
    def effective_mass(self):
        """float: Resonator mass *m0*, or ``None``."""
        return self._effective_mass

    @property
    def minimum_detectable_mass(self):
        """float: Minimum detectable mass, or ``None``."""
        return self._minimum_detectable_mass

    def dissipation_shares(self):
        """Fraction of the total dissipation in each channel.

        Returns
        -------
        dict
            ``Q_total / Q_i`` for each channel. Lossless channels have zero
            share. The shares sum to 1 unless every channel is lossless.

        """
        if math.isinf(self._q_total):
            return {label: 0.0 for label in self._channels}
        return {label: self._q_total / q for label, q in self._channels.items()}

    def to_dict(self):
        """Convert to a flat record with fixed field order.

        Returns
        -------
        dict
            Record with the standard fields, then any extra channels as
            ``q_<label>``.

        """
        record = {
            "resonant_frequency": self._resonant_frequency,
            "regime": None if self._regime is None else self._regime.value,
        }
        for label in self._standard_channels:
            record[f"q_{label}"] = self._channels.get(label)
        for label, q in self._channels.items():
            if label not in self._standard_channels:
                record[f"q_{label}"] = q
        record["q_total"] = self._q_total
        record["effective_mass"] = self._effective_mass
        record["minimum_detectable_mass"] = self._minimum_detectable_mass
        return record

    def __repr__(self):
        return f"QBudget(q_total={self._q_total!r}, channels={self._channels!r})"


def q_total(channels, **kwargs):
    """Combine channel quality factors.

    Parameters
    ----------
    channels : dict or list
        Channel quality factors as a mapping or as ``(label, Q)`` pairs. Each
        quality factor must be positive; :data:`LOSSLESS` is allowed.
    kwargs
        Extra fields forwarded to :class:`QBudget`.

    Returns
    -------
    :class:`QBudget`
        Budget with ``1/Q_total = Σ 1/Q_i``.

    Raises
    ------
    EmptyChannelListError
        If there are no channels.
    ValueError
        If a quality factor is not positive or a label is repeated.

    """
    if hasattr(channels, "items"):
        channels = channels.items()
    channels = [(str(label), float(q)) for label, q in channels]
    if len(channels) == 0:
        raise EmptyChannelListError("At least one channel is required")
    labels = [label for label, _ in channels]
    if len(set(labels)) != len(labels):
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        raise ValueError(f"Duplicate channel labels: {', '.join(duplicates)}")
    for label, q in channels:
        if math.isnan(q) or q <= 0:
            raise ValueError(f"Quality factor of channel {label!r} must be positive")

    dissipation = math.fsum(1.0 / q for _, q in channels if not math.isinf(q))
    total = LOSSLESS if dissipation == 0 else 1.0 / dissipation
    return QBudget(channels, total, **kwargs)


def mass_sensitivity(m0, f0, q, frequency_resolution_factor=1.0):
    """Minimum detectable mass.

    The smallest resolvable frequency shift is taken as
    ``Δf_min = factor · f0 / Q``, so that ``Δm_min = 2 m0 Δf_min / f0``.

    Parameters
    ----------
    m0 : float
        Resonator mass (kg).
    f0 : float
        Resonant frequency (Hz).
    q : float
        Quality factor.
    frequency_resolution_factor : float
        Proportionality factor of the frequency resolution.

    Returns
    -------
    float
        Minimum detectable mass (kg). It is zero for a lossless resonator.

    """
    for value, name in (
        (m0, "Mass"),
        (f0, "Frequency"),
        (q, "Quality factor"),
        (frequency_resolution_factor, "Frequency resolution factor"),
    ):
        if not value > 0:
            raise ValueError(f"{name} must be positive")
    delta_f = frequency_resolution_factor * f0 / q
    return 2 * m0 * delta_f / f0


def mass_responsivity(m0, f0):
    """Frequency shift per loaded mass, ``-f0 / (2 m0)`` (Hz/kg)."""
    if not m0 > 0 or not f0 > 0:
        raise ValueError("Mass and frequency must be positive")
    return -f0 / (2 * m0)


def evaluate_budget(
    geometry,
    material,
    gas,
    mode,
    sphere,
    q_others=None,
    knudsen_viscous=KNUDSEN_VISCOUS,
    knudsen_molecular=KNUDSEN_MOLECULAR,
    frequency_resolution_factor=1.0,
):
    """Evaluate every dissipation channel at an operating point.

    Parameters
    ----------
    geometry : :class:`~cantileverq.Geometry`
        Beam geometry.
    material : :class:`~cantileverq.Material`
        Beam material with thermal data.
    gas : :class:`~cantileverq.GasEnvironment`
        Gas state.
    mode : :class:`~cantileverq.ModeSpec`
        Mode with a support-loss constant.
    sphere : :class:`~cantileverq.SphereModel`
        Sphere approximation for the viscous regime.
    q_others : float
        Residual quality factor to include as the ``others`` channel.
    knudsen_viscous : float
        Upper Knudsen number of the viscous regime.
    knudsen_molecular : float
        Lower Knudsen number of the molecular regime.
    frequency_resolution_factor : float
        Proportionality factor of the frequency resolution.

    Returns
    -------
    :class:`QBudget`
        The complete budget.

    """
    f0 = resonant_frequency(geometry, material, mode)
    qa, regime = q_air(
        geometry, material, gas, mode, sphere, knudsen_viscous, knudsen_molecular
    )
    channels = [
        ("air", qa),
        ("support", q_support(geometry, mode)),
        ("ted", q_ted(geometry, material, f0, gas.temperature)),
    ]
    if q_others is not None:
        channels.append(("others", q_others))

    m0 = beam_mass(geometry, material)
    total = q_total(channels).q_total
    return QBudget(
        channels,
        total,
        regime=regime,
        resonant_frequency=f0,
        effective_mass=m0,
        minimum_detectable_mass=mass_sensitivity(
            m0, f0, total, frequency_resolution_factor
        ),
    )
