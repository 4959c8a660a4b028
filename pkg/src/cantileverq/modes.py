import functools
import math

import numpy
import scipy.optimize

from .errors import MissingModeConstantError, NoInteriorNodesError

#: Support-loss constants *C* known for each mode index.
DEFAULT_SUPPORT_LOSS_CONSTANTS = {1: 2.081}

#: Upper bound of the support-loss constant.
MAX_SUPPORT_LOSS_CONSTANT = 2.081


@functools.lru_cache(maxsize=None)
def mode_eigenvalue(n):
    """Eigenvalue of a clamped-free beam mode.

    The eigenvalue *k_n* is the *n*-th positive root of
    ``1 + cos(k) cosh(k) = 0``. The root lies in ``((n-1)π, nπ)`` and is
    found by bracketed root finding on the equivalent form
    ``cos(k) + 1/cosh(k) = 0``, which stays well scaled for large *k*.

    Parameters
    ----------
    n : int
        Mode index, starting from 1.

    Returns
    -------
    float
        Eigenvalue *k_n*.

    """
    if isinstance(n, bool) or not isinstance(n, (int, numpy.integer)):
        raise TypeError("Mode index must be an integer")
    if n < 1:
        raise ValueError("Mode index must be at least 1")
    n = int(n)

    def characteristic(k):
        return math.cos(k) + 1.0 / math.cosh(k)

    return scipy.optimize.brentq(
        characteristic,
        (n - 1) * math.pi,
        n * math.pi,
        xtol=1e-14,
        rtol=4 * numpy.finfo(float).eps,
        maxiter=200,
    )


class ModeSpec:
    """Flexural mode of the cantilever.

    Parameters
    ----------
    index : int
        Mode index *n*, starting from 1.
    support_loss_constant : float
        Support-loss constant *C*, in ``(0, 2.081]``. If ``None``, support loss
        cannot be evaluated for this mode.
    eigenvalue : float
        Mode eigenvalue *k_n*. If ``None``, it is computed from ``index``.

    """

    def __init__(self, index, support_loss_constant=None, eigenvalue=None):
        if isinstance(index, bool) or not isinstance(index, (int, numpy.integer)):
            raise TypeError("Mode index must be an integer")
        if index < 1:
            raise ValueError("Mode index must be at least 1")
        self._index = int(index)

        if support_loss_constant is not None:
            C = float(support_loss_constant)
            if not (0 < C <= MAX_SUPPORT_LOSS_CONSTANT):
                raise ValueError(
                    "Support-loss constant must be in "
                    f"(0, {MAX_SUPPORT_LOSS_CONSTANT}]"
                )
            support_loss_constant = C
        self._support_loss_constant = support_loss_constant

        if eigenvalue is None:
            eigenvalue = mode_eigenvalue(self._index)
        else:
            eigenvalue = float(eigenvalue)
            if eigenvalue <= 0:
                raise ValueError("Eigenvalue must be positive")
        self._eigenvalue = eigenvalue

    @classmethod
    def from_table(cls, index, table=None):
        """Create a mode with its support-loss constant looked up in a table.

        Parameters
        ----------
        index : int
            Mode index.
        table : dict
            Support-loss constants keyed by mode index. Defaults to
            :data:`DEFAULT_SUPPORT_LOSS_CONSTANTS`.

        Returns
        -------
        :class:`ModeSpec`
            The mode.

        Raises
        ------
        MissingModeConstantError
            If ``table`` has no constant for ``index``.

        """
        if table is None:
            table = DEFAULT_SUPPORT_LOSS_CONSTANTS
        try:
            C = table[index]
        except KeyError:
            raise MissingModeConstantError(
                f"No support-loss constant configured for mode {index}"
            )
        return cls(index, support_loss_constant=C)

    @property
    def index(self):
        """int: Mode index *n*."""
        return self._index

    @property
    def eigenvalue(self):
        """float: Mode eigenvalue *k_n*."""
        return self._eigenvalue

    @property
    def support_loss_constant(self):
        """float: Support-loss constant *C*, or ``None``."""
        return self._support_loss_constant

    def has_support_loss_constant(self):
        """bool: True if the support-loss constant is set."""
        return self._support_loss_constant is not None

    def __eq__(self, other):
        if not isinstance(other, ModeSpec):
            return NotImplemented
        return (self._index, self._support_loss_constant, self._eigenvalue) == (
            other._index,
            other._support_loss_constant,
            other._eigenvalue,
        )

    def __hash__(self):
        return hash((self._index, self._support_loss_constant, self._eigenvalue))

    def __repr__(self):
        return (
            f"ModeSpec({self._index}, "
            f"support_loss_constant={self._support_loss_constant!r})"
        )


def _as_index(mode):
    if isinstance(mode, ModeSpec):
        return mode.index, mode.eigenvalue
    return int(mode), mode_eigenvalue(mode)


def _unnormalized_shape(k, x):
    a = k * x
    # 1 - sigma without cancellation between cosh and sinh
    one_minus_sigma = (math.sin(k) - math.cos(k) - math.exp(-k)) / (
        math.sinh(k) + math.sin(k)
    )
    sigma = 1.0 - one_minus_sigma
    growing = 0.5 * one_minus_sigma * numpy.exp(a) + 0.5 * (1 + sigma) * numpy.exp(-a)
    return growing - numpy.cos(a) + sigma * numpy.sin(a)


def mode_shape(mode, x):
    """Clamped-free mode shape.

    The mode shape is
    ``φ(x) = cosh(kx) - cos(kx) - σ (sinh(kx) - sin(kx))`` with
    ``σ = (cosh k + cos k) / (sinh k + sin k)``, normalized so that the free
    tip has unit displacement.

    Parameters
    ----------
    mode : int or :class:`ModeSpec`
        Mode.
    x : float or array_like
        Positions along the beam normalized by its length, from 0 (clamp) to
        1 (tip).

    Returns
    -------
    float or :class:`numpy.ndarray`
        Displacement relative to the tip.

    """
    _, k = _as_index(mode)
    x = numpy.asarray(x, dtype=float)
    if numpy.any(x < 0) or numpy.any(x > 1):
        raise ValueError("Positions must be between 0 and 1")
    phi = _unnormalized_shape(k, x) / _unnormalized_shape(k, 1.0)
    if phi.ndim == 0:
        return float(phi)
    return phi


def mode_shape_nodes(mode, strict=False):
    """Interior node points of a mode.

    Nodes are located by a sign-change scan of the mode shape on a grid of
    ``200 n`` intervals, then polished by bracketed root finding.

    Parameters
    ----------
    mode : int or :class:`ModeSpec`
        Mode.
    strict : bool
        If True, raise an error for the fundamental mode instead of returning
        an empty list.

    Returns
    -------
    list of float
        Node positions normalized by the length, strictly increasing.

    Raises
    ------
    NoInteriorNodesError
        If ``strict`` is True and the mode has no interior nodes.

    """
    n, k = _as_index(mode)
    if n == 1:
        if strict:
            raise NoInteriorNodesError("Mode 1 has no interior nodes")
        return []

    x = numpy.linspace(0, 1, 200 * n + 1)[1:]
    phi = _unnormalized_shape(k, x)
    (change,) = numpy.nonzero(numpy.sign(phi[:-1]) != numpy.sign(phi[1:]))

    def shape(xi):
        return float(_unnormalized_shape(k, xi))

    nodes = []
    for i in change:
        if phi[i] == 0:
            # already bracketed by the previous interval
            continue
        nodes.append(
            scipy.optimize.brentq(shape, x[i], x[i + 1], xtol=1e-13, rtol=1e-15)
        )
    return nodes
