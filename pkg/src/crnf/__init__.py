"""Exact computer algebra for the normal-form theory of infinite-type
hypersurface geometry: truncated power series over Gaussian rationals,
defining-function conversions, associated singular ODEs, resonance spectra,
and degree-by-degree normalization with exact certificates."""

from .rationals import GaussRat, Q
from .series import MultiSeries, solve_implicit
from .hypersurface import (
    ComplexDefining,
    ExponentialForm,
    RealHypersurface,
    useries,
)
from .segre import (
    ProductMap,
    SegreFamily,
    recover_parameter_map,
    recover_parameter_series,
    segre_of_hypersurface,
)

__version__ = "0.1.0"
