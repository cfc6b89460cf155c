"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; nothing
here mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-8
PSD_CLIP = 1e-10


class NonSquare(ValueError):
    pass


class NotHermitian(ValueError):
    pass


class NotPSD(ValueError):
    pass


class NotDensity(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    return a


def _require_square(m: np.ndarray) -> None:
    if m.shape[0] != m.shape[1]:
        raise NonSquare(f"matrix of shape {m.shape} is not square")


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m, tol: float = 1e-10) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= tol)


def is_unitary(m, tol: float = 1e-11) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m @ dagger(m) - np.eye(m.shape[0]))) <= tol)


def is_psd(m, tol: float = PSD_CLIP) -> bool:
    m = as_matrix(m)
    if not is_hermitian(m, HERMITIAN_TOL):
        return False
    return bool(np.linalg.eigvalsh(0.5 * (m + dagger(m)))[0] >= -tol)


def is_density(m, tol: float = PSD_CLIP) -> bool:
    m = as_matrix(m)
    return is_psd(m, tol) and abs(np.trace(m) - 1.0) <= max(tol, 1e-12) * m.shape[0]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues (descending) with the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ dagger(u)


def _canonical_phase(vecs: np.ndarray) -> np.ndarray:
    # make the first largest-modulus component of each column real positive
    out = vecs.copy()
    mods = np.abs(out)
    for c in range(out.shape[1]):
        col = mods[:, c]
        idx = int(np.flatnonzero(col >= col.max() - 1e-12)[0])
        out[:, c] *= np.conj(out[idx, c]) / abs(out[idx, c])
    return out


def herm_eig(m) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The input is symmetrised before solving. Eigenvector phases are fixed so
    that the first component of largest modulus is real and positive, which
    makes repeated calls on the same input bit-identical.
    """
    m = as_matrix(m)
    _require_square(m)
    dev = np.max(np.abs(m - dagger(m)), initial=0.0)
    if dev > HERMITIAN_TOL:
        raise NotHermitian(f"max |M - M^dag| = {dev:.3e}")
    h = 0.5 * (m + dagger(m))
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], _canonical_phase(v[:, order]))


def eigvalsh_desc(m) -> np.ndarray:
    m = as_matrix(m)
    _require_square(m)
    return np.linalg.eigvalsh(0.5 * (m + dagger(m)))[::-1]


def singular_values(m) -> np.ndarray:
    """Singular values in descending order; their sum is the trace norm."""
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def trace_norm(m) -> float:
    return float(np.sum(singular_values(m)))


def kron(a, b) -> np.ndarray:
    """Kronecker product with composite row index ``i_a * dim_b + i_b``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def ket(d: int, k: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[k] = 1.0
    return e


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, np.conj(v))


def max_entangled(d: int) -> np.ndarray:
    """The vector (1/sqrt d) sum_k |k k>."""
    return np.eye(d, dtype=complex).reshape(d * d) / np.sqrt(d)


def partial_transpose(m, d1: int, d2: int, subsystem: int = 2) -> np.ndarray:
    m = as_matrix(m)
    n = d1 * d2
    if m.shape != (n, n):
        raise DimensionMismatch(f"matrix shape {m.shape} does not match {d1}x{d2}")
    if subsystem not in (1, 2):
        raise ValueError("subsystem must be 1 or 2")
    t = m.reshape(d1, d2, d1, d2)
    if subsystem == 1:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(n, n)


def _clipped_eigenvalues(rho) -> np.ndarray:
    rho = as_matrix(rho)
    _require_square(rho)
    if not is_hermitian(rho, HERMITIAN_TOL):
        raise NotHermitian("input is not Hermitian")
    w = eigvalsh_desc(rho)
    if w[-1] < -PSD_CLIP:
        raise NotPSD(f"minimum eigenvalue {w[-1]:.3e} below -{PSD_CLIP:g}")
    return np.clip(w, 0.0, None)


def schatten_norm_of_spectrum(w, p: float) -> float:
    w = np.clip(np.asarray(w, dtype=float), 0.0, None)
    if np.isinf(p):
        return float(w.max())
    if p == 1:
        return float(w.sum())
    return float(np.sum(w**p) ** (1.0 / p))


def schatten_p_norm(rho, p: float) -> float:
    """Schatten p-norm of a positive semidefinite matrix (p >= 1 or inf)."""
    if not (p >= 1):
        raise ValueError(f"p must be >= 1, got {p}")
    return schatten_norm_of_spectrum(_clipped_eigenvalues(rho), p)


def entropy_of_spectrum(w) -> float:
    w = np.clip(np.asarray(w, dtype=float), 0.0, None)
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def von_neumann_entropy(rho) -> float:
    """Entropy in bits, with 0 log 0 = 0."""
    rho = as_matrix(rho)
    try:
        w = _clipped_eigenvalues(rho)
    except (NotPSD, NotHermitian) as exc:
        raise NotDensity(str(exc)) from exc
    if abs(w.sum() - 1.0) > 1e-9:
        raise NotDensity(f"trace {w.sum():.12g} is not 1")
    return entropy_of_spectrum(w)
