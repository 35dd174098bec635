"""Adaptive two-dimensional rational decompositions on the torus.

Engines: Fourier (``fd``), product adaptive Fourier decomposition (``afd``),
and the greedy family ``ga``, ``oga``, ``preoga`` over the product-Szegő
dictionary.
"""

from .afd import ProductAfdResult, partial_sum, run_fd, run_product_afd
from .dictionary import (DiscPoint, ParameterGrid, build_parameter_grid, eval_product_atom,
                         eval_szego_1d, eval_tm_basis, eval_tm_product, tm_frame)
from .engines import ENGINES, reconstruct_at, run_engine
from .errors import (Afd2dError, DictionaryExhaustedError, DimensionError, DomainError,
                     EscalationLimitError, NumericalFailure, SingularNodeError)
from .greedy import AtomRef, GreedyState, gram_schmidt_extend, run_ga, run_oga, run_preoga
from .metrics import bhattacharyya, evaluate, histogram, mssim, psnr
from .realsig import decompose_real, plus_projection, reconstruct_real, split_real
from .signal import Signal2D, TorusGrid, inner_product, norm, sample_toy_signal

__version__ = "0.1.0"
