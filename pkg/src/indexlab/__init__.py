"""Index integral transforms built on Mellin-Barnes contour quadrature.

Submodules: ``complexfn`` (gamma, incomplete gamma, Bessel, pFq), ``quad``
(semi-axis and vertical-line quadrature), ``mellin`` (Mellin images and a
catalog of known pairs), ``kernels`` (transform families), ``transforms``
(forward, inverse and round trips) and ``cli``.
"""

from .complexfn import *  # noqa: F401,F403
from .errors import *  # noqa: F401,F403
from .kernels import *  # noqa: F401,F403
from .mellin import *  # noqa: F401,F403
from .quad import *  # noqa: F401,F403
from .transforms import *  # noqa: F401,F403

__version__ = "0.1.0"
