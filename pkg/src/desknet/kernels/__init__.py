"""Hot-kernel backend selection.

Two interchangeable implementations of the convolution/pooling kernels:

* ``desknet.kernels._fast`` — compiled Cython loops (built at install time)
* ``desknet.kernels.pure``  — numpy im2col fallback

The compiled backend is preferred when importable. Set the environment
variable ``DESKNET_KERNELS=python`` or ``DESKNET_KERNELS=compiled`` before
import to force a choice (forcing an unavailable backend raises). The two
backends agree to float64 rounding (see tests and ``desknet bench``), but
results are only guaranteed bitwise-reproducible within one backend.
"""

import os

from . import pure

try:
    from . import _fast
except ImportError:  # extension not built; numpy fallback carries on
    _fast = None

_CHOICES = {"compiled", "python", ""}


def _select():
    requested = os.environ.get("DESKNET_KERNELS", "").strip().lower()
    if requested not in _CHOICES:
        raise RuntimeError(
            f"DESKNET_KERNELS must be 'compiled' or 'python', got {requested!r}"
        )
    if requested == "python":
        return pure
    if requested == "compiled":
        if _fast is None:
            raise RuntimeError(
                "DESKNET_KERNELS=compiled but the extension is not built; "
                "reinstall the package with a C compiler available"
            )
        return _fast
    return _fast if _fast is not None else pure


_impl = _select()

BACKEND = _impl.NAME
compiled_available = _fast is not None

conv2d_forward = _impl.conv2d_forward
conv2d_backward = _impl.conv2d_backward
maxpool_forward = _impl.maxpool_forward
maxpool_backward = _impl.maxpool_backward


def backends():
    """Importable backend modules, keyed by name."""
    out = {"python": pure}
    if _fast is not None:
        out["compiled"] = _fast
    return out
