"""Kernel backend selection.

The heavy per-pixel loops live in two interchangeable modules:

* ``numba_impl`` — jitted, used by default when numba imports cleanly,
* ``numpy_impl`` — pure numpy, always available.

Set ``CHESTSEG_BACKEND`` to ``numba`` or ``numpy`` to force one; ``auto``
(or unset) prefers numba and silently falls back to numpy when numba is
missing. Both backends produce identical results.
"""

import os

from ..exceptions import ConfigError

_choice = os.environ.get("CHESTSEG_BACKEND", "auto").strip().lower()

if _choice not in ("auto", "numba", "numpy"):
    raise ConfigError(
        "CHESTSEG_BACKEND must be 'auto', 'numba' or 'numpy', got %r" % _choice
    )

if _choice == "numpy":
    from . import numpy_impl as _impl

    BACKEND = "numpy"
elif _choice == "numba":
    from . import numba_impl as _impl

    BACKEND = "numba"
else:
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        from . import numpy_impl as _impl

        BACKEND = "numpy"

median_inpaint = _impl.median_inpaint
preprocess_cube = _impl.preprocess_cube
binary_dilate = _impl.binary_dilate
binary_erode = _impl.binary_erode
label_components = _impl.label_components
flood_from_border = _impl.flood_from_border
nms_gradient = _impl.nms_gradient
hysteresis = _impl.hysteresis
band_magnitude_max = _impl.band_magnitude_max
masked_mean_inpainted = _impl.masked_mean_inpainted
