"""
    Values of finite zero-sum stochastic games under general discounting
    densities, and numerical Tauberian experiments.

    * - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - -
    *This is free software: you can redistribute it and/or modify it under
    *the terms of version 2 of the GNU Lesser General Public License
    *as published by the Free Software Foundation.
    *Notes:
    *1. A value V[rho] weights the running cost g(z(t)) along the play by a
    *   density rho on [0, inf). Cesaro (uniform), Abel (exponential),
    *   shifted power and rescaled densities all give value families.
    *2. Values are computed as brackets [lo, hi] by backward induction over
    *   integer stages; hi - lo never exceeds the truncated tail mass.
    *3. The harness estimates the common limit of the families, reports
    *   sup-norm deviations from it, and audits the density level
    *   hypotheses and constructions behind the equivalence.
    * - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - -
"""
__version__ = '0.2'

from .errors import *
from .density_calculus import *
from .constructions import *
from .games import *
from .minimax import *
from .classes import *
from .valuation import *
from .tauberian import *

__all__ = errors.__all__ + density_calculus.__all__ + constructions.__all__ + \
    games.__all__ + minimax.__all__ + classes.__all__ + valuation.__all__ + tauberian.__all__
