"""Hermitian linear algebra on dense complex matrices.

Every matrix function in the package (powers, logarithms, ``g(A)``) goes
through :func:`eig_hermitian`; there is deliberately no Schur or Padé path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DegeneracyError,
    DimensionError,
    DomainError,
    EigenError,
    NotHermitianError,
    RangeError,
)

#: relative asymmetry above which a matrix is rejected as non-Hermitian
ASYMMETRY_RTOL = 1e-8
#: relative eigenvalue floor for positive definiteness (scaled by dim)
EPS_PD = 1e-12
#: reconstruction tolerance per unit dimension
RTOL_RECON = 1e-11


def _as_square(data) -> np.ndarray:
    M = np.array(np.asarray(data), dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {M.shape}")
    return M


def opnorm(M) -> float:
    """Largest singular value of ``M``."""
    M = np.asarray(M)
    if not np.any(M):
        return 0.0
    return float(np.linalg.norm(M, 2))


class HermitianMatrix:
    """Immutable complex self-adjoint matrix.

    The input is replaced by its Hermitian part ``(M + M*)/2``; the
    discarded skew part is kept in :attr:`asymmetry` (operator norm).
    Inputs whose skew part exceeds ``1e-8 * ||M||_op`` are rejected.
    """

    __array_priority__ = 100

    def __init__(self, data):
        if isinstance(data, HermitianMatrix):
            self._data = data._data
            self.asymmetry = data.asymmetry
            if "eig" in data.__dict__:
                self.__dict__["eig"] = data.__dict__["eig"]
            return
        M = _as_square(data)
        if not np.all(np.isfinite(M)):
            raise RangeError("matrix has non-finite entries")
        H = (M + M.conj().T) / 2
        K = M - H
        asym = opnorm(K)
        if asym > ASYMMETRY_RTOL * opnorm(M):
            raise NotHermitianError(
                f"asymmetry {asym:.3e} exceeds {ASYMMETRY_RTOL:g} * ||M||_op = "
                f"{ASYMMETRY_RTOL * opnorm(M):.3e}"
            )
        H.setflags(write=False)
        self._data = H
        self.asymmetry = asym

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data if not copy else self._data.copy()
        return self._data.astype(dtype)

    @cached_property
    def eig(self) -> SpectralDecomposition:
        return eig_hermitian(self)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig.eigenvalues

    def __add__(self, other):
        if isinstance(other, (int, float)) and other == 0:
            return self
        return HermitianMatrix(self._data + np.asarray(other))

    __radd__ = __add__

    def __mul__(self, c):
        if np.iscomplexobj(c) or not np.isscalar(c):
            return NotImplemented
        return HermitianMatrix(self._data * float(c))

    __rmul__ = __mul__

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})\n{self._data!r}"


class SpdMatrix(HermitianMatrix):
    """Hermitian matrix whose smallest eigenvalue clears the positivity floor.

    The floor is ``lambda_min > dim * EPS_PD * lambda_max``.
    """

    def __init__(self, data):
        super().__init__(data)
        lam = self.eigenvalues
        floor = self.dim * EPS_PD * max(lam[0], 0.0)
        if not lam[-1] > floor:
            raise DegeneracyError(
                f"not positive definite: lambda_min={lam[-1]:.3e}, "
                f"lambda_max={lam[0]:.3e}, floor={floor:.3e}"
            )


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in nonincreasing order and matching unitary eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T

    def map(self, values) -> np.ndarray:
        """``U diag(values) U*`` for a vector aligned with the eigenvalues."""
        U = self.eigenvectors
        return (U * values) @ U.conj().T


def eig_hermitian(A) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues nonincreasing."""
    H = A.data if isinstance(A, HermitianMatrix) else HermitianMatrix(A).data
    try:
        w, U = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        fro = float(np.linalg.norm(H))
        raise EigenError(
            f"eigen-solver did not converge (dim={H.shape[0]}, ||A||_F={fro:.3e}, "
            f"finite={bool(np.all(np.isfinite(H)))})"
        ) from exc
    w = w[::-1].copy()
    U = U[:, ::-1].copy()
    w.setflags(write=False)
    U.setflags(write=False)
    return SpectralDecomposition(w, U)


def apply_scalar_function(A, f, domain=(-np.inf, np.inf)) -> HermitianMatrix:
    """Spectral calculus: ``U diag(f(lambda)) U*``.

    Parameters
    ----------
    A : HermitianMatrix or array_like
    f : callable
        Vectorized real function applied to the eigenvalues.
    domain : (float, float)
        Closed interval every eigenvalue must lie in.
    """
    A = A if isinstance(A, HermitianMatrix) else HermitianMatrix(A)
    dec = A.eig
    lo, hi = domain
    lam = dec.eigenvalues
    bad = (lam < lo) | (lam > hi)
    if np.any(bad):
        raise DomainError(
            f"eigenvalue {lam[bad][0]!r} outside domain [{lo}, {hi}]"
        )
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        fl = np.asarray(f(lam), dtype=float)
    if not np.all(np.isfinite(fl)):
        raise RangeError(f"f produced non-finite values on eigenvalues {lam}")
    return HermitianMatrix(dec.map(fl))


def fractional_power(A, t: float) -> SpdMatrix:
    """Real power ``A**t`` of a positive definite matrix, any real ``t``."""
    A = A if isinstance(A, SpdMatrix) else SpdMatrix(A)
    t = float(t)
    if t == 0.0:
        return SpdMatrix(np.eye(A.dim))
    if t == 1.0:
        return A
    dec = A.eig
    with np.errstate(over="ignore"):
        lt = dec.eigenvalues ** t
    if not np.all(np.isfinite(lt)):
        raise RangeError(f"A**{t} overflows (eigenvalues {dec.eigenvalues})")
    return SpdMatrix(dec.map(lt))


def sqrt_and_invsqrt(A: SpdMatrix) -> tuple[np.ndarray, np.ndarray]:
    """``A^{1/2}`` and ``A^{-1/2}`` from a single decomposition."""
    dec = A.eig
    r = np.sqrt(dec.eigenvalues)
    return dec.map(r), dec.map(1.0 / r)


def singular_values(M) -> np.ndarray:
    """Singular values (nonincreasing) of a square matrix.

    Hermitian inputs use ``|lambda|`` from the cached decomposition. General
    inputs use an SVD: going through ``M* M`` squares the condition number,
    which is too lossy for prefix products of small singular values.
    """
    if isinstance(M, HermitianMatrix):
        return np.sort(np.abs(M.eigenvalues))[::-1]
    M = np.asarray(M, dtype=complex)
    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise EigenError(f"SVD did not converge for a {M.shape} matrix") from exc


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed) % 2**64)


def random_unitary(dim: int, seed, real: bool = False) -> np.ndarray:
    """Haar-distributed unitary via QR of a Gaussian matrix (phase-corrected)."""
    rng = _rng(seed)
    G = rng.standard_normal((dim, dim))
    if not real:
        G = G + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(G)
    d = np.diagonal(R)
    ph = d / np.abs(d)
    return (Q * ph).astype(complex)


def random_spd(dim: int, seed, cond_target: float = 10.0, real: bool = False) -> SpdMatrix:
    """Seeded positive definite matrix with a prescribed condition number.

    Eigenvalues are log-uniform on ``[cond^-1/2, cond^1/2]`` with both
    endpoints present (for ``dim >= 2``), so the condition number equals
    ``cond_target`` up to rounding. A 1x1 draw is a single log-uniform value.
    """
    if dim < 1:
        raise DimensionError("dim must be >= 1")
    if not cond_target >= 1:
        raise DomainError("cond_target must be >= 1")
    rng = _rng(seed)
    half = 0.5 * np.log(cond_target)
    if dim == 1:
        logs = rng.uniform(-half, half, 1)
    else:
        logs = np.concatenate([[half, -half], rng.uniform(-half, half, dim - 2)])
    U = random_unitary(dim, rng, real=real)
    return SpdMatrix((U * np.exp(logs)) @ U.conj().T)


def random_hermitian(dim: int, seed, real: bool = False) -> HermitianMatrix:
    rng = _rng(seed)
    G = rng.standard_normal((dim, dim))
    if not real:
        G = G + 1j * rng.standard_normal((dim, dim))
    return HermitianMatrix((G + G.conj().T) / 2)


def matrix_to_json(M) -> dict:
    """Matrix JSON form ``{"dim": n, "re": [[...]], "im": [[...]]}``."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {A.shape}")
    out = {"dim": A.shape[0], "re": A.real.tolist(), "im": A.imag.tolist()}
    if A.shape[0] != A.shape[1]:
        out["cols"] = A.shape[1]
    return out


def matrix_from_json(obj: dict) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    A = re + 1j * im
    if A.ndim != 2 or A.shape[0] != obj["dim"]:
        raise DimensionError(f"matrix JSON dim {obj['dim']} does not match data {A.shape}")
    return A
