"""Kernel backend selection.

Two interchangeable implementations of the hot enumeration loops exist: a
compiled extension (``heckelab._speedups``, built from Cython) and a
pure-Python/numpy fallback (``heckelab._pure``).  The compiled one is used
when importable; set ``HECKELAB_KERNEL=pure`` or ``HECKELAB_KERNEL=compiled``
to force a choice (forcing ``compiled`` raises if the extension is missing).

The compiled backend works in fixed-width integers, so calls whose values
could overflow it are routed to the exact pure backend regardless of the
selection; results are identical either way.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pure

_choice = os.environ.get("HECKELAB_KERNEL", "").strip().lower()

if _choice == "pure":
    _impl = _pure
elif _choice == "compiled":
    from . import _speedups as _impl  # raises ImportError if not built
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND


def backend_name() -> str:
    """Name of the active kernel backend ('compiled' or 'pure')."""
    return BACKEND


def materialize_b(n: int, p: int, b, reach, budget: int) -> np.ndarray:
    """Dispatch ``materialize_b``; see ``heckelab._pure.materialize_b``.

    ``reach`` is indexable by block size ``r = 1..n`` and yields iterables
    of encoded type keys.
    """
    impl = _impl
    if not _pure.int64_safe(_pure.det_bound(n, p, b)):
        impl = _pure
    return impl.materialize_b(n, p, tuple(b), reach, int(budget))


def classify_products(xs, ys, n: int, p: int, prec: int) -> dict:
    """Dispatch ``classify_products``; see ``heckelab._pure.classify_products``."""
    impl = _impl
    # The compiled path multiplies residues below ``prec`` in 128-bit
    # registers (safe for prec < 2**60, entries being far smaller than prec).
    if not _pure.int64_safe(prec):
        impl = _pure
    return impl.classify_products(xs, ys, n, p, int(prec))
