"""Frequency-response peaks and quality-factor extraction."""

import enum
import math
import warnings

import numpy
import scipy.optimize

from . import _compatibility
from .dissipation import LOSSLESS
from .errors import (
    BandwidthUnresolvedError,
    ModelInconsistencyWarning,
    NonConvergenceWarning,
    NoPeakError,
)

#: Fewest points a sweep needs before a peak can be fit.
MIN_FIT_POINTS = 8


class FrequencySweep:
    """Amplitude response sampled over frequency.

    Parameters
    ----------
    frequency : list
        Frequencies (Hz), strictly increasing.
    amplitude : list
        Amplitudes, nonnegative, one per frequency.
    metadata : dict
        Descriptor of the operating point, for example the geometry, pressure,
        and mode.

    """

    def __init__(self, frequency, amplitude, metadata=None):
        f = numpy.array(
            frequency, ndmin=1, copy=_compatibility.numpy_copy_if_needed, dtype=float
        )
        a = numpy.array(
            amplitude, ndmin=1, copy=_compatibility.numpy_copy_if_needed, dtype=float
        )
        if f.ndim != 1 or a.ndim != 1:
            raise TypeError("Frequency and amplitude must be 1D arrays")
        if f.shape != a.shape:
            raise TypeError("Frequency and amplitude must have the same length")
        if f.shape[0] == 0:
            raise ValueError("Sweep must have at least one point")
        if not numpy.all(numpy.isfinite(f)) or not numpy.all(numpy.isfinite(a)):
            raise ValueError("Sweep values must be finite")
        if numpy.any(numpy.diff(f) <= 0):
            raise ValueError("Frequencies must be strictly increasing")
        if numpy.any(a < 0):
            raise ValueError("Amplitudes must be nonnegative")

        self._frequency = f.copy()
        self._frequency.flags.writeable = False
        self._amplitude = a.copy()
        self._amplitude.flags.writeable = False
        self.metadata = metadata

    @property
    def N(self):
        """int: Number of points."""
        return self._frequency.shape[0]

    @property
    def frequency(self):
        """(*N*,) :class:`numpy.ndarray`: Frequencies (read only)."""
        return self._frequency

    @property
    def amplitude(self):
        """(*N*,) :class:`numpy.ndarray`: Amplitudes (read only)."""
        return self._amplitude

    @property
    def points(self):
        """list of tuple: ``(frequency, amplitude)`` pairs in order."""
        return list(zip(self._frequency.tolist(), self._amplitude.tolist()))

    @property
    def metadata(self):
        """dict: Operating-point descriptor."""
        return self._metadata

    @metadata.setter
    def metadata(self, value):
        if value is None:
            value = {}
        self._metadata = dict(value)

    def require_fit_points(self):
        """Check that the sweep is long enough to fit.

        Raises
        ------
        ValueError
            If the sweep has fewer than :data:`MIN_FIT_POINTS` points.

        """
        if self.N < MIN_FIT_POINTS:
            raise ValueError(
                f"Fitting requires at least {MIN_FIT_POINTS} points, got {self.N}"
            )

    def __eq__(self, other):
        if not isinstance(other, FrequencySweep):
            return NotImplemented
        return (
            numpy.array_equal(self._frequency, other._frequency)
            and numpy.array_equal(self._amplitude, other._amplitude)
            and self._metadata == other._metadata
        )

    def __repr__(self):
        return f"FrequencySweep(N={self.N}, metadata={self._metadata!r})"


class PeakMethod(str, enum.Enum):
    """Method used to extract a peak."""

    HALF_POWER = "half_power"
    LORENTZIAN_LS = "lorentzian_ls"


class PeakFit:
    """Fitted resonance peak.

    Parameters
    ----------
    f0 : float
        Resonant frequency (Hz).
    q : float
        Quality factor.
    amplitude_peak : float
        Height of the peak above the baseline.
    baseline : float
        Additive baseline.
    residual_rms : float
        Root-mean-square residual of the peak model over the sweep.
    method : :class:`PeakMethod`
        Extraction method.
    converged : bool
        False if an iterative fit stopped before converging.

    """

    def __init__(
        self, f0, q, amplitude_peak, baseline, residual_rms, method, converged=True
    ):
        if not f0 > 0:
            raise ValueError("Resonant frequency must be positive")
        if not q > 0:
            raise ValueError("Quality factor must be positive")
        if not residual_rms >= 0:
            raise ValueError("Residual must be nonnegative")
        self.f0 = float(f0)
        self.q = float(q)
        self.amplitude_peak = float(amplitude_peak)
        self.baseline = float(baseline)
        self.residual_rms = float(residual_rms)
        self.method = PeakMethod(method)
        self.converged = bool(converged)

    @property
    def bandwidth(self):
        """float: Half-power bandwidth ``f0 / Q``."""
        return self.f0 / self.q

    @property
    def amplitude(self):
        """float: Static amplitude *A* of the oscillator model."""
        return self.amplitude_peak / _peak_gain(self.q)

    def to_dict(self):
        """Convert to a flat record with snake_case keys."""
        return {
            "f0": self.f0,
            "q": self.q,
            "amplitude_peak": self.amplitude_peak,
            "baseline": self.baseline,
            "residual_rms": self.residual_rms,
            "method": self.method.value,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, data):
        """Create from a record made by :meth:`to_dict`."""
        return cls(**data)

    def __repr__(self):
        return (
            f"PeakFit(f0={self.f0!r}, q={self.q!r}, method={self.method.value!r}, "
            f"converged={self.converged!r})"
        )


def _peak_gain(q):
    # maximum of 1/sqrt((1-r²)² + (r/q)²) over r
    if q <= 1 / math.sqrt(2):
        return 1.0
    return q / math.sqrt(1 - 1 / (4 * q**2))


def oscillator_response(frequency, f0, q, amplitude, baseline=0.0):
    """Amplitude response of a driven damped harmonic oscillator.

    Parameters
    ----------
    frequency : float or array_like
        Drive frequencies (Hz).
    f0 : float
        Resonant frequency (Hz).
    q : float
        Quality factor.
    amplitude : float
        Static amplitude *A*.
    baseline : float
        Additive baseline.

    Returns
    -------
    :class:`numpy.ndarray`
        ``A / sqrt((1 - r²)² + (r/Q)²) + baseline`` with ``r = f / f0``.

    """
    r = numpy.asarray(frequency, dtype=float) / f0
    return amplitude / numpy.sqrt((1 - r**2) ** 2 + (r / q) ** 2) + baseline


def synthesize_peak(f0, q, amplitude, baseline, grid, noise_rms=0.0, seed=0):
    """Synthesize a resonance sweep.

    Gaussian noise is added to the oscillator response, and amplitudes that
    the noise pushes below zero are clipped to zero.

    Parameters
    ----------
    f0 : float
        Resonant frequency (Hz).
    q : float
        Quality factor.
    amplitude : float
        Static amplitude *A*; the peak height is about ``A Q``.
    baseline : float
        Additive baseline.
    grid : list
        Frequencies to sample (Hz).
    noise_rms : float
        Standard deviation of the additive noise.
    seed : int
        Seed of the random number generator.

    Returns
    -------
    :class:`FrequencySweep`
        The sweep. The same seed always gives the same sweep.

    """
    if not f0 > 0 or not q > 0 or not amplitude > 0:
        raise ValueError("Peak parameters must be positive")
    if noise_rms < 0:
        raise ValueError("Noise must be nonnegative")
    grid = numpy.asarray(grid, dtype=float)
    y = oscillator_response(grid, f0, q, amplitude, baseline)
    if noise_rms > 0:
        rng = numpy.random.default_rng(seed)
        y = y + rng.normal(0.0, noise_rms, size=y.shape)
    y = numpy.clip(y, 0.0, None)
    metadata = {
        "f0": f0,
        "q": q,
        "amplitude": amplitude,
        "baseline": baseline,
        "noise_rms": noise_rms,
        "seed": seed,
    }
    return FrequencySweep(grid, y, metadata=metadata)


def fit_half_power(sweep, baseline=0.0):
    """Extract a peak from its half-power bandwidth.

    The peak height and frequency are refined by fitting ``1/y²`` as a
    quadratic in ``f²`` over the points above half power, which is exact for
    the oscillator response. The half-power crossings are then found by linear
    interpolation on either side of the peak, and ``Q = f0 / (f_hi - f_lo)``.

    Parameters
    ----------
    sweep : :class:`FrequencySweep`
        Sweep with a single interior peak.
    baseline : float
        Baseline to subtract before locating the peak.

    Returns
    -------
    :class:`PeakFit`
        The peak.

    Raises
    ------
    NoPeakError
        If the maximum is at an end of the sweep.
    BandwidthUnresolvedError
        If a half-power point is outside the sweep.

    """
    sweep.require_fit_points()
    f = sweep.frequency
    y = sweep.amplitude - baseline
    N = sweep.N

    i = int(numpy.argmax(y))
    if i == 0 or i == N - 1 or y[i] <= 0:
        raise NoPeakError("Maximum is at the end of the sweep")

    # contiguous window above half power, at least the peak and its neighbors
    cut = y[i] / math.sqrt(2)
    lo = i
    while lo > 1 and y[lo - 1] >= cut:
        lo -= 1
    hi = i
    while hi < N - 2 and y[hi + 1] >= cut:
        hi += 1
    lo = min(lo, i - 1)
    hi = max(hi, i + 1)

    window = slice(lo, hi + 1)
    u = f[window] ** 2 - f[i] ** 2
    scale = numpy.max(numpy.abs(u))
    f_peak = f[i]
    y_peak = y[i]
    if numpy.all(y[window] > 0):
        c2, c1, c0 = numpy.polyfit(u / scale, 1 / y[window] ** 2, 2)
    else:
        c2 = 0.0
    if c2 > 0:
        u_min = -c1 / (2 * c2)
        z_min = c0 - c1**2 / (4 * c2)
        f_sq = f[i] ** 2 + u_min * scale
        if z_min > 0 and f_sq > 0:
            f_candidate = math.sqrt(f_sq)
            if f[0] < f_candidate < f[-1]:
                f_peak = f_candidate
                y_peak = 1 / math.sqrt(z_min)

    half = min(y_peak / math.sqrt(2), y[i])
    j = i
    while j >= 0 and y[j] >= half:
        j -= 1
    if j < 0:
        raise BandwidthUnresolvedError("Lower half-power point is below the sweep")
    f_lo = f[j] + (half - y[j]) * (f[j + 1] - f[j]) / (y[j + 1] - y[j])
    j = i
    while j < N and y[j] >= half:
        j += 1
    if j == N:
        raise BandwidthUnresolvedError("Upper half-power point is above the sweep")
    f_hi = f[j - 1] + (half - y[j - 1]) * (f[j] - f[j - 1]) / (y[j] - y[j - 1])

    q = f_peak / (f_hi - f_lo)
    model = oscillator_response(f, f_peak, q, y_peak / _peak_gain(q), baseline)
    residual_rms = float(numpy.sqrt(numpy.mean((model - sweep.amplitude) ** 2)))
    return PeakFit(
        f0=f_peak,
        q=q,
        amplitude_peak=y_peak,
        baseline=baseline,
        residual_rms=residual_rms,
        method=PeakMethod.HALF_POWER,
    )


def fit_lorentzian(sweep, initial=None, max_iterations=200):
    """Refine a peak by nonlinear least squares.

    The oscillator response is fit over its resonant frequency, quality
    factor, static amplitude, and baseline using the Levenberg-Marquardt
    method with an analytic Jacobian. The fit stops when the relative
    parameter step falls below 1e-9.

    Parameters
    ----------
    sweep : :class:`FrequencySweep`
        Sweep with a single interior peak.
    initial : :class:`PeakFit`
        Starting estimate. If ``None``, :func:`fit_half_power` is used.
    max_iterations : int
        Cap on the number of model evaluations.

    Returns
    -------
    :class:`PeakFit`
        The refined peak. If the fit does not converge, the best estimate is
        returned with ``converged = False`` and a
        :class:`~cantileverq.errors.NonConvergenceWarning` is issued.

    """
    sweep.require_fit_points()
    if initial is None:
        initial = fit_half_power(sweep)
    f = sweep.frequency
    s = float(numpy.max(sweep.amplitude))
    if s <= 0:
        raise NoPeakError("Sweep has no signal")
    y = sweep.amplitude / s
    f0_initial = initial.f0

    def unpack(x):
        r = f / (x[0] * f0_initial)
        q = math.exp(x[1])
        D2 = (1 - r**2) ** 2 + (r / q) ** 2
        return r, q, D2

    def residuals(x):
        _, _, D2 = unpack(x)
        return math.exp(x[2]) / numpy.sqrt(D2) + x[3] - y

    def jacobian(x):
        r, q, D2 = unpack(x)
        A = math.exp(x[2])
        D = numpy.sqrt(D2)
        D3 = D2 * D
        dD2_dr = -4 * r * (1 - r**2) + 2 * r / q**2
        J = numpy.empty((r.shape[0], 4))
        J[:, 0] = A * r * dD2_dr / (2 * x[0] * D3)
        J[:, 1] = A * r**2 / (q**2 * D3)
        J[:, 2] = A / D
        J[:, 3] = 1.0
        return J

    x0 = numpy.array(
        [
            1.0,
            math.log(initial.q),
            math.log(max(initial.amplitude, 1e-300) / s),
            initial.baseline / s,
        ]
    )
    result = scipy.optimize.least_squares(
        residuals,
        x0,
        jac=jacobian,
        method="lm",
        x_scale="jac",
        xtol=1e-9,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=max_iterations,
    )
    converged = result.status > 0
    if not converged:
        warnings.warn(
            f"Peak fit did not converge in {max_iterations} evaluations",
            NonConvergenceWarning,
            stacklevel=2,
        )

    x = result.x
    f0 = x[0] * f0_initial
    q = math.exp(x[1])
    if not f[0] <= f0 <= f[-1]:
        raise NoPeakError("Fitted resonance is outside the sweep")
    amplitude = s * math.exp(x[2])
    residual_rms = s * float(numpy.sqrt(numpy.mean(result.fun**2)))
    return PeakFit(
        f0=f0,
        q=q,
        amplitude_peak=amplitude * _peak_gain(q),
        baseline=s * x[3],
        residual_rms=residual_rms,
        method=PeakMethod.LORENTZIAN_LS,
        converged=converged,
    )


def extract_residual_q(measured_q, modeled_channels):
    """Quality factor of dissipation the models do not account for.

    The residual channel satisfies ``1/Q_others = 1/Q_measured - Σ 1/Q_i``.

    Parameters
    ----------
    measured_q : float
        Measured quality factor.
    modeled_channels : :class:`~cantileverq.QBudget`, dict, or list
        Modeled channels as a budget, a mapping, or ``(label, Q)`` pairs. An
        ``others`` channel of a budget is ignored.

    Returns
    -------
    float
        Residual quality factor. If the models already dissipate at least as
        much as was measured, :data:`~cantileverq.LOSSLESS` is returned and a
        :class:`~cantileverq.errors.ModelInconsistencyWarning` is issued.

    """
    if not measured_q > 0:
        raise ValueError("Measured quality factor must be positive")
    if hasattr(modeled_channels, "channels"):
        channels = [
            (label, q)
            for label, q in modeled_channels.channels.items()
            if label != "others"
        ]
    elif hasattr(modeled_channels, "items"):
        channels = list(modeled_channels.items())
    else:
        channels = list(modeled_channels)

    for label, q in channels:
        if not q > 0:
            raise ValueError(f"Quality factor of channel {label!r} must be positive")

    # measured term first so that equal values cancel exactly
    dissipation = math.fsum(
        [1.0 / measured_q] + [-1.0 / q for _, q in channels if not math.isinf(q)]
    )
    if dissipation <= 0:
        warnings.warn(
            f"Modeled channels dissipate at least as much as measured Q = "
            f"{measured_q:g}; no residual loss",
            ModelInconsistencyWarning,
            stacklevel=2,
        )
        return LOSSLESS
    return 1.0 / dissipation
