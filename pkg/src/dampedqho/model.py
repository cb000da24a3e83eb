"""Lazily built kernel tables for one (bath, oscillator, grid) triple."""
from __future__ import annotations

from functools import cached_property

from .correlation import build_correlation, build_noise_moments
from .gaussian_algebra import OrderedCovariance
from .master import exact_coefficients, weak_coupling_coefficients
from .numerics import TimeGrid
from .propagator import build_propagator, local_coefficients, spectral_quadrature

__all__ = ["DampedOscillator"]


class DampedOscillator:
    """Bundle of tables sharing one frequency rule and one time grid.

    Parameters
    ----------
    bath : BathSpectrum
    osc : OscillatorParams
    grid : TimeGrid
    spec : QuadratureSpec, optional
    """

    def __init__(self, bath, osc, grid, spec=None):
        if not isinstance(grid, TimeGrid):
            raise TypeError("grid must be a TimeGrid")
        self.bath = bath
        self.osc = osc
        self.grid = grid
        self.spec = spec

    @cached_property
    def quad(self):
        return spectral_quadrature(self.bath, self.osc, self.grid.t_max, self.spec)

    def _quad(self):
        return None if self.bath.eta == 0 else self.quad

    @cached_property
    def propagator(self):
        return build_propagator(self.bath, self.osc, self.grid, self.spec, self._quad())

    @cached_property
    def local(self):
        return local_coefficients(self.propagator)

    @cached_property
    def correlation(self):
        return build_correlation(self.bath, self.osc, self.grid, self.spec, self._quad())

    @cached_property
    def noise(self):
        return build_noise_moments(self.propagator, self.bath, self.spec, self._quad())

    @cached_property
    def covariance(self):
        return OrderedCovariance(self.propagator, self.correlation)

    @cached_property
    def exact(self):
        return exact_coefficients(self.local, self.noise)

    @cached_property
    def weak(self):
        return weak_coupling_coefficients(self.bath, self.osc, self.grid, self.spec,
                                          self._quad())
