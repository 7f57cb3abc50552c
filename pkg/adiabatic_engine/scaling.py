"""
Critical-scaling analysis.

Exponent algebra near a quantum critical point, log-log power-law fits of
measured series, and the local form of an optimal schedule through the
critical point.

Design notes
------------
- Exponents are inputs. Only the Ising chain ships known values
  (:data:`ISING_EXPONENTS`); nothing here derives them from a Hamiltonian.
- The rescaled geometric tensor scales with kappa = alpha_i + alpha_j - 2z - d.
  Along a geodesic the local equation X'' + nu kappa X'^2 / (2X) = 0 for
  X = x - x_c is solved by X = A |s - s_c|^chi with chi = 2 / (2 + nu kappa).
- Fits are ordinary least squares on (log t, log y) with
  ``scipy.stats.linregress``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import linregress

from .errors import InsufficientSamples, NonPositiveData

_LOGGER = logging.getLogger(__name__)

DEFAULT_WINDOW = (1e-3, 1e-1)
MIN_SAMPLES = 5

FloatArray = NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class CriticalExponents:
    """
    Universality data of a critical point.

    Attributes
    ----------
    nu:
        Correlation-length exponent, xi ~ |x - x_c|^-nu.
    z:
        Dynamical exponent, gap ~ xi^-z.
    d:
        Spatial dimension.
    alpha_i, alpha_j:
        Scaling dimensions of the local operators coupled to x^i and x^j.
    """

    nu: float
    z: float
    d: float
    alpha_i: float
    alpha_j: float

    def __post_init__(self) -> None:
        if not self.nu > 0.0:
            raise ValueError("nu must be positive")
        if not self.z > 0.0:
            raise ValueError("z must be positive")
        if not self.d >= 1.0:
            raise ValueError("d must be at least 1")

    @classmethod
    def relevant(cls, nu: float, z: float, d: float) -> CriticalExponents:
        """Exponents for the operator driving the transition, alpha = d + z - 1/nu."""
        alpha = scaling_dimension(nu, z, d)
        return cls(nu=nu, z=z, d=d, alpha_i=alpha, alpha_j=alpha)

    def to_dict(self) -> dict[str, float]:
        return {
            "nu": self.nu,
            "z": self.z,
            "d": self.d,
            "alpha_i": self.alpha_i,
            "alpha_j": self.alpha_j,
        }


def scaling_dimension(nu: float, z: float, d: float) -> float:
    """alpha = d + z - 1/nu of the relevant perturbation."""
    return d + z - 1.0 / nu


def kappa(exponents: CriticalExponents) -> float:
    """kappa_ij = alpha_i + alpha_j - 2z - d."""
    return exponents.alpha_i + exponents.alpha_j - 2.0 * exponents.z - exponents.d


def chi(nu: float, kappa_value: float) -> float:
    """
    Geodesic exponent 2 / (2 + nu kappa).

    Raises
    ------
    ValueError
        If 2 + nu kappa <= 0 (no power-law passage).
    """
    denominator = 2.0 + nu * kappa_value
    if denominator <= 0.0:
        raise ValueError(f"2 + nu kappa = {denominator:g} is not positive")
    return 2.0 / denominator


def chi_from_dimension(d: float, nu: float) -> float:
    """2 / (d nu), equal to :func:`chi` when alpha = d + z - 1/nu."""
    return 2.0 / (d * nu)


ISING_EXPONENTS = CriticalExponents.relevant(nu=1.0, z=1.0, d=1.0)


@dataclass(frozen=True, slots=True)
class PowerLawFit:
    """
    Least-squares fit y = prefactor * t^exponent.

    ``stderr`` is the standard error of the slope; ``window`` is the t-range
    that was used (``None`` when every sample was kept).
    """

    exponent: float
    prefactor: float
    r_squared: float
    stderr: float
    samples: int
    window: tuple[float, float] | None

    def report(self, theoretical: float | None = None) -> dict[str, Any]:
        document: dict[str, Any] = {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "r_squared": self.r_squared,
            "stderr": self.stderr,
            "samples": self.samples,
            "window": None if self.window is None else list(self.window),
        }
        if theoretical is not None:
            document["theoretical"] = theoretical
            document["deviation"] = abs(self.exponent - theoretical)
        return document


def fit_power_law(
    t: ArrayLike,
    y: ArrayLike,
    window: tuple[float, float] | None = DEFAULT_WINDOW,
    *,
    min_samples: int = MIN_SAMPLES,
) -> PowerLawFit:
    """
    Fit log y = exponent log t + log prefactor.

    Parameters
    ----------
    t, y:
        Samples of equal length.
    window:
        Inclusive range of t to keep; ``None`` keeps every sample.
    min_samples:
        Smallest accepted number of samples inside the window.

    Raises
    ------
    InsufficientSamples
        If fewer than ``min_samples`` points fall inside the window.
    NonPositiveData
        If a kept sample has t <= 0 or y <= 0 (or is not finite).
    """
    abscissa = np.asarray(t, dtype=np.float64).ravel()
    ordinate = np.asarray(y, dtype=np.float64).ravel()
    if abscissa.shape != ordinate.shape:
        raise ValueError("t and y must have the same length")
    if window is not None:
        lower, upper = window
        if not 0.0 < lower < upper:
            raise ValueError(f"invalid fit window {window}")
        keep = (abscissa >= lower) & (abscissa <= upper)
        abscissa, ordinate = abscissa[keep], ordinate[keep]
    if abscissa.size < min_samples:
        raise InsufficientSamples(
            f"{abscissa.size} samples inside window {window}, at least {min_samples} required"
        )
    valid = np.isfinite(abscissa) & np.isfinite(ordinate) & (abscissa > 0.0) & (ordinate > 0.0)
    if not np.all(valid):
        raise NonPositiveData(f"{int(np.sum(~valid))} samples are not positive and finite")

    result = linregress(np.log(abscissa), np.log(ordinate))
    fit = PowerLawFit(
        exponent=float(result.slope),
        prefactor=float(math.exp(result.intercept)),
        r_squared=float(result.rvalue**2),
        stderr=float(result.stderr),
        samples=int(abscissa.size),
        window=None if window is None else (float(window[0]), float(window[1])),
    )
    _LOGGER.debug("power-law fit on %d samples: exponent=%.6f r2=%.8f", fit.samples, fit.exponent, fit.r_squared)
    return fit


@dataclass(frozen=True, slots=True)
class FiniteSizeFits:
    """Power-law fits of a size series over all sizes and over its two halves."""

    overall: PowerLawFit
    small: PowerLawFit
    large: PowerLawFit

    def report(self) -> dict[str, Any]:
        return {
            "overall": self.overall.report(),
            "small_sizes": self.small.report(),
            "large_sizes": self.large.report(),
        }


def fit_finite_size(lengths: ArrayLike, values: ArrayLike) -> FiniteSizeFits:
    """
    Fit values ~ L^exponent over all sizes and separately over the smaller and
    larger halves of the series, without locating the crossover between them.

    Raises
    ------
    InsufficientSamples
        If fewer than four sizes are given.
    """
    sizes = np.asarray(lengths, dtype=np.float64).ravel()
    series = np.asarray(values, dtype=np.float64).ravel()
    if sizes.size < 4:
        raise InsufficientSamples("finite-size fits need at least four sizes")
    order = np.argsort(sizes)
    sizes, series = sizes[order], series[order]
    half = sizes.size // 2
    return FiniteSizeFits(
        overall=fit_power_law(sizes, series, window=None, min_samples=2),
        small=fit_power_law(sizes[: half + 1], series[: half + 1], window=None, min_samples=2),
        large=fit_power_law(sizes[half:], series[half:], window=None, min_samples=2),
    )


class PassageSide(str, Enum):
    """Branch of the local schedule around the critical point."""

    APPROACH = "approach"
    DEPARTURE = "departure"
    BOTH = "both"


@dataclass(frozen=True, slots=True)
class LocalGeodesic:
    """
    x(s) = x_c + sign * amplitude * |s - s_c|^chi near the critical point.

    The sign is -1 on the approach branch, +1 on the departure branch and
    sign(s - s_c) for ``PassageSide.BOTH``.
    """

    x_c: float
    s_c: float
    amplitude: float
    chi: float
    nu_kappa: float
    side: PassageSide = PassageSide.BOTH

    def _sign(self, s: FloatArray) -> FloatArray:
        if self.side is PassageSide.APPROACH:
            return -np.ones_like(s)
        if self.side is PassageSide.DEPARTURE:
            return np.ones_like(s)
        return np.sign(s - self.s_c)

    def __call__(self, s: ArrayLike) -> FloatArray:
        values = np.asarray(s, dtype=np.float64)
        return self.x_c + self._sign(values) * self.amplitude * np.abs(values - self.s_c) ** self.chi

    def derivatives(self, s: ArrayLike) -> tuple[FloatArray, FloatArray, FloatArray]:
        """Return X = x - x_c, dX/ds and d^2X/ds^2 (for s != s_c)."""
        values = np.asarray(s, dtype=np.float64)
        offset = values - self.s_c
        distance = np.abs(offset)
        sign = self._sign(values)
        direction = np.sign(offset)
        scale = sign * self.amplitude
        displacement = scale * distance**self.chi
        first = scale * self.chi * distance ** (self.chi - 1.0) * direction
        second = scale * self.chi * (self.chi - 1.0) * distance ** (self.chi - 2.0)
        return displacement, first, second


def critical_geodesic_local(
    exponents: CriticalExponents,
    x_c: float,
    s_c: float,
    A: float,
    side: PassageSide | str = PassageSide.BOTH,
) -> LocalGeodesic:
    """
    Local optimal schedule x_c + A (s - s_c)^chi through a critical point.

    Raises
    ------
    ValueError
        If 2 + nu kappa <= 0.
    """
    nu_kappa = exponents.nu * kappa(exponents)
    return LocalGeodesic(
        x_c=float(x_c),
        s_c=float(s_c),
        amplitude=float(A),
        chi=chi(exponents.nu, kappa(exponents)),
        nu_kappa=nu_kappa,
        side=PassageSide(side),
    )


def local_geodesic_residual(local: LocalGeodesic, s: ArrayLike) -> FloatArray:
    """|X'' + nu kappa X'^2 / (2X)| at points s != s_c."""
    displacement, first, second = local.derivatives(s)
    return np.asarray(np.abs(second + local.nu_kappa * first**2 / (2.0 * displacement)), dtype=np.float64)


def fit_local_amplitude(
    s: ArrayLike,
    x: ArrayLike,
    x_c: float,
    s_c: float,
    chi_value: float,
    *,
    half_width: float = 0.05,
) -> float:
    """
    Least-squares amplitude A of x - x_c = sign(s - s_c) A |s - s_c|^chi.

    Uses samples with 0 < |s - s_c| <= ``half_width``.

    Raises
    ------
    InsufficientSamples
        If fewer than two samples fall inside the window.
    """
    knots = np.asarray(s, dtype=np.float64).ravel()
    positions = np.asarray(x, dtype=np.float64).ravel()
    offset = knots - s_c
    keep = (np.abs(offset) > 0.0) & (np.abs(offset) <= half_width)
    if np.count_nonzero(keep) < 2:
        raise InsufficientSamples(f"fewer than two samples within {half_width} of s_c={s_c}")
    basis = np.sign(offset[keep]) * np.abs(offset[keep]) ** chi_value
    target = positions[keep] - x_c
    return float(np.dot(basis, target) / np.dot(basis, basis))
