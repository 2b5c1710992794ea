"""Reference computations coded independently of the package.

They use the general (non-Hermitian) eigen-solver or scipy's Schur-Padé
routines so an error in the package's Hermitian path cannot hide in both.
"""

import numpy as np
from scipy.linalg import fractional_matrix_power, sqrtm


def eig_power(M, t):
    """``M^t`` for a diagonalizable matrix with positive spectrum via ``np.linalg.eig``."""
    w, V = np.linalg.eig(np.asarray(M, dtype=complex))
    return (V * w.real ** t) @ np.linalg.inv(V)


def geomean_eig(A, B, t):
    """``A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`` along the general eigen-path."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    h = eig_power(A, 0.5)
    hi = np.linalg.inv(h)
    return h @ eig_power(hi @ B @ hi, t) @ h


def geomean_scipy(A, B, t):
    """Same mean through ``A (A^{-1} B)^t`` with a Schur-Padé fractional power."""
    A = np.asarray(A, dtype=complex)
    return A @ fractional_matrix_power(np.linalg.solve(A, B), t)


def psd_sqrt(A):
    return sqrtm(np.asarray(A, dtype=complex))
