"""Select the serial-SGS kernel backend at import time.

The compiled extension is used when it was built; set ``MRCPSP_EDA_PURE=1``
to force the pure-Python kernels.
"""

import os

from . import _sgs_py

if os.environ.get("MRCPSP_EDA_PURE"):
    impl = _sgs_py
else:
    try:
        from . import _sgs_ext as impl
    except ImportError:
        impl = _sgs_py

BACKEND = impl.BACKEND


def available_backends():
    out = {"python": _sgs_py}
    try:
        from . import _sgs_ext

        out["cython"] = _sgs_ext
    except ImportError:
        pass
    return out


def kernel_data(instance, backend=None):
    """Per-instance kernel tables, cached on the (immutable) instance."""
    backend = backend or impl
    key = "_kernel_" + backend.BACKEND
    data = instance.__dict__.get(key)
    if data is None:
        data = backend.KernelData(instance)
        instance.__dict__[key] = data
    return data
