"""Backend selection for the statevector hot loops.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``DISMAGICK_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the NumPy implementation is used.  ``BACKEND`` names the
active choice.
"""
import os

from . import _kernels_py

_force_py = os.environ.get("DISMAGICK_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

pauli_moment4 = _impl.pauli_moment4
pauli_expectation = _impl.pauli_expectation
apply_two_qubit_inplace = _impl.apply_two_qubit_inplace
pauli_sample_site = _impl.pauli_sample_site
pauli_expectation_table = _impl.pauli_expectation_table

__all__ = ["BACKEND", "pauli_moment4", "pauli_expectation", "apply_two_qubit_inplace",
           "pauli_sample_site", "pauli_expectation_table"]
