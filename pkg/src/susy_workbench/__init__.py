"""Supersymmetric partner Hamiltonians, quasi Dirac operators and a
finite-difference eigensolver to check their spectra."""
from . import analytic, dirac, eigensolver, planar, potentials
from .analytic import QuantizationInput, isotonic_match, quantization_energy
from .dirac import DiracParams, quasi_elements, perfect_square_elements
from .eigensolver import Grid, Spectrum, discretize, eigen_lowest, solve_on_domain
from .errors import WorkbenchError
from .kernels import BACKEND
from .planar import PlanarConfig, VectorPotential, reduce_planar
from .potentials import (IsotonicShifted, Linear, LinearInverse, Tabulated, isochronous_pair,
                         partner_potentials)

__version__ = "0.1.0"
