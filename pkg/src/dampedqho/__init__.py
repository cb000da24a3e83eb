"""Exact non-Markovian dynamics of a damped quantum harmonic oscillator.

An oscillator coupled to an Ohmic bath with Gaussian cutoff is solved
exactly through its retarded Green function and the Gibbs-state
correlation function. On top of these kernels the package evaluates
Gaussian-state trajectories for several initial conditions, the exact
and weak-coupling master-equation coefficients, and multi-time
measurement statistics.
"""
from .bath import BathSpectrum, OscillatorParams
from .errors import (ConfigError, ConvergenceError, DampedQHOError, DivergentIntegralError,
                     GridError, MaskedTimeError, PhysicalityError, PoleError)
from .model import DampedOscillator
from .numerics import QuadratureSpec, TimeGrid
from .scenarios import GaussianState, PreparationSpec, QuenchSpec, purity

__version__ = "0.1.0"

__all__ = [
    "BathSpectrum",
    "OscillatorParams",
    "DampedOscillator",
    "QuadratureSpec",
    "TimeGrid",
    "GaussianState",
    "PreparationSpec",
    "QuenchSpec",
    "purity",
    "DampedQHOError",
    "ConfigError",
    "ConvergenceError",
    "DivergentIntegralError",
    "GridError",
    "MaskedTimeError",
    "PhysicalityError",
    "PoleError",
]
