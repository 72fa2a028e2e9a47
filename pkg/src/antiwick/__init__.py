"""Anti-Wick quantization, spectral bottoms and ball-average gap estimators."""
from .errors import (AntiWickError, ConfigError, CoverageError, DomainError, NumericError,
                     ShapeError, ValidationError)
from .symbols import (BallSpec, Semiclassical, Symbol, abs_power, ainfty_constant, ball_average,
                      constant, eval_symbol, growth_check, parse_symbol, polynomial, radial)
from .coherent import CoherentFrame, PhaseGrid, SpatialGrid, StateVector
from .quantize import HermiteOperator, assemble, assemble_polynomial, assemble_quadrature
from .spectral import SpectrumResult, converge_bottom, spectrum_bottom
from .gaps import SearchConfig, lambda_gap, lambda_ess_gap, lambda_sup_gap

__version__ = "0.1.0"
