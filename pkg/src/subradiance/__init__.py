"""Multiphoton subradiance in arrays of two-level atoms.

Typical use::

    from subradiance import HilbertSpace, build_lattice, assemble, diagonalize
    from subradiance.dynamics import evolve_imprinted

    space = HilbertSpace(16, 2)
    A = assemble(space, build_lattice((1, 1, 16), 0.1))
    spec = diagonalize(A)
    series = evolve_imprinted(spec, space, 45, times)
"""

from .coupling import CouplingMatrix, assemble, gauge_strip
from .errors import DomainError, InvalidDimensionError, NumericalError, SubradianceError
from .geometry import Lattice, build_lattice, separation
from .hilbert import HilbertSpace, enumerate_configs, phase_index, rank, sort_pair, unrank
from .kernel import eval_f, eval_g
from .spectral import Spectrum, diagonalize, sort_modes

__all__ = [
    "CouplingMatrix",
    "DomainError",
    "HilbertSpace",
    "InvalidDimensionError",
    "Lattice",
    "NumericalError",
    "Spectrum",
    "SubradianceError",
    "assemble",
    "build_lattice",
    "diagonalize",
    "enumerate_configs",
    "eval_f",
    "eval_g",
    "gauge_strip",
    "phase_index",
    "rank",
    "separation",
    "sort_modes",
    "sort_pair",
    "unrank",
]
