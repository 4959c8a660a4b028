import warnings

import numpy

from . import _compatibility
from .errors import ModelValidityWarning


class Geometry:
    """Rectangular cantilever geometry.

    The cantilever is clamped at one end and free at the other. Its ``length``
    runs from the clamp to the free tip, its ``width`` is the in-plane dimension
    facing the gas flow, and its ``thickness`` is the dimension along the
    direction of flexural vibration. All lengths are in meters.

    The dimensions must satisfy ``0 < thickness <= width <= length``. The beam
    models assume a slender beam; a :class:`~cantileverq.errors.ModelValidityWarning`
    is issued if ``length / thickness < 2``, but the geometry is still accepted.

    Parameters
    ----------
    length : float
        Length *L* of the cantilever.
    width : float
        Width *W* of the cantilever.
    thickness : float
        Thickness *t* of the cantilever.

    """

    min_aspect_ratio = 2.0

    def __init__(self, length, width, thickness):
        length = self._positive(length, "Length")
        width = self._positive(width, "Width")
        thickness = self._positive(thickness, "Thickness")
        if thickness > width:
            raise ValueError("Thickness cannot exceed width")
        if width > length:
            raise ValueError("Width cannot exceed length")
        self._length = length
        self._width = width
        self._thickness = thickness

        if not self.is_slender():
            warnings.warn(
                f"Aspect ratio L/t = {self.aspect_ratio:g} is below "
                f"{self.min_aspect_ratio:g}, beam models may not apply",
                ModelValidityWarning,
                stacklevel=2,
            )

    @staticmethod
    def _positive(value, name):
        try:
            v = float(value)
        except (TypeError, ValueError):
            raise TypeError(f"{name} must be a number")
        if not numpy.isfinite(v) or v <= 0:
            raise ValueError(f"{name} must be positive")
        return v

    @classmethod
    def cast(cls, value):
        """Cast a sequence to a :class:`Geometry`.

        If ``value`` has 3 elements, it is unpacked as::

            length, width, thickness = value

        Parameters
        ----------
        value : list
            3-element array representing the geometry.

        Returns
        -------
        :class:`Geometry`
            A geometry matching the array.

        """
        if isinstance(value, Geometry):
            return value
        v = numpy.array(
            value, ndmin=1, copy=_compatibility.numpy_copy_if_needed, dtype=float
        )
        if v.shape != (3,):
            raise TypeError(f"Unable to cast geometry-like object with shape {v.shape}")
        return Geometry(*v)

    @property
    def length(self):
        """float: Length *L*."""
        return self._length

    @property
    def width(self):
        """float: Width *W*."""
        return self._width

    @property
    def thickness(self):
        """float: Thickness *t*."""
        return self._thickness

    @property
    def aspect_ratio(self):
        """float: Slenderness *L/t*."""
        return self._length / self._thickness

    @property
    def footprint(self):
        """float: Plan area *L W*."""
        return self._length * self._width

    @property
    def volume(self):
        """float: Volume *L W t*."""
        return self._length * self._width * self._thickness

    def is_slender(self):
        """Check if the beam models apply.

        Returns
        -------
        bool
            True if ``length / thickness`` is at least :attr:`min_aspect_ratio`.

        """
        return self.aspect_ratio >= self.min_aspect_ratio

    def replace(self, length=None, width=None, thickness=None):
        """Copy the geometry with some dimensions changed.

        Parameters
        ----------
        length : float
            New length. Default of ``None`` keeps the current value.
        width : float
            New width. Default of ``None`` keeps the current value.
        thickness : float
            New thickness. Default of ``None`` keeps the current value.

        Returns
        -------
        :class:`Geometry`
            The new geometry.

        """
        return Geometry(
            self._length if length is None else length,
            self._width if width is None else width,
            self._thickness if thickness is None else thickness,
        )

    def to_dict(self):
        """Convert to a mapping of dimension names to values."""
        return {
            "length": self._length,
            "width": self._width,
            "thickness": self._thickness,
        }

    def __eq__(self, other):
        if not isinstance(other, Geometry):
            return NotImplemented
        return (self._length, self._width, self._thickness) == (
            other._length,
            other._width,
            other._thickness,
        )

    def __hash__(self):
        return hash((self._length, self._width, self._thickness))

    def __repr__(self):
        return (
            f"Geometry(length={self._length!r}, width={self._width!r}, "
            f"thickness={self._thickness!r})"
        )
