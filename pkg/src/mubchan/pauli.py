"""Generalized Pauli operators and the mutually unbiased bases they generate."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .linalg import as_matrix, dagger, is_unitary


class BadDimension(ValueError):
    pass


class IncompleteFamily(ValueError):
    pass


class PauliLabel(NamedTuple):
    j: int  # power of X
    k: int  # power of Z


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


def shift(d: int) -> np.ndarray:
    """X |e_k> = |e_{k+1}>."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock(d: int) -> np.ndarray:
    """Z |e_k> = w^k |e_k>."""
    return np.diag(omega(d) ** np.arange(d))


def weyl(d: int, label) -> np.ndarray:
    """X^j Z^k in the standard 0-based basis."""
    if d < 2:
        raise BadDimension(f"dimension must be >= 2, got {d}")
    j, k = label
    x = np.linalg.matrix_power(shift(d), j % d)
    z = np.diag(omega(d) ** ((k % d) * np.arange(d)))
    return x @ z


def _generator(d: int, label: PauliLabel) -> np.ndarray:
    w = weyl(d, label)
    # (X Z^k)^d = -I for even d and odd k; rescale so that W^d = I
    if d % 2 == 0 and label.j % 2 == 1 and label.k % 2 == 1:
        w = w * np.exp(1j * np.pi / d)
    return w


def _eigenbasis(w: np.ndarray) -> np.ndarray:
    """Rows n are unit eigenvectors of ``w`` for eigenvalue w^n."""
    d = w.shape[0]
    om = omega(d)
    powers = [np.eye(d, dtype=complex)]
    for _ in range(d - 1):
        powers.append(powers[-1] @ w)
    out = np.empty((d, d), dtype=complex)
    for n in range(d):
        proj = sum(om ** (-n * j) * powers[j] for j in range(d)) / d
        col = proj[:, int(np.argmax(np.linalg.norm(proj, axis=0)))]
        v = col / np.linalg.norm(col)
        mods = np.abs(v)
        idx = int(np.flatnonzero(mods >= mods.max() - 1e-12)[0])
        out[n] = v * np.conj(v[idx]) / abs(v[idx])
    return out


@dataclass(frozen=True, eq=False)
class MubFamily:
    """Generators W_J and their eigenbases.

    ``bases[J, n]`` is the eigenvector of ``generators[J]`` with eigenvalue
    w^n. Axes are 0-based in code; axis ``J`` here is axis ``J + 1`` in the
    conventional 1-based labelling.
    """

    d: int
    generators: np.ndarray
    bases: np.ndarray
    labels: tuple

    @property
    def kappa(self) -> int:
        return self.generators.shape[0]

    @property
    def complete(self) -> bool:
        return self.kappa == self.d + 1

    @cached_property
    def powers(self) -> np.ndarray:
        """``powers[J, j] = W_J^j`` for j = 0..d-1."""
        k, d = self.kappa, self.d
        out = np.empty((k, d, d, d), dtype=complex)
        for J in range(k):
            out[J, 0] = np.eye(d)
            for j in range(1, d):
                out[J, j] = out[J, j - 1] @ self.generators[J]
        return out

    def axis_state(self, J: int, n: int) -> np.ndarray:
        return self.bases[J, n]

    def obu(self) -> np.ndarray:
        """Orthogonal unitary basis (I, W_1^1..W_1^{d-1}, W_2^1, ...)."""
        mats = [np.eye(self.d, dtype=complex)]
        for J in range(self.kappa):
            mats.extend(self.powers[J, 1:])
        return np.array(mats)

    def to_json(self) -> dict:
        def enc(a):
            a = np.asarray(a)
            return [[float(z.real), float(z.imag)] for z in a.reshape(-1)]

        return {
            "d": self.d,
            "kappa": self.kappa,
            "labels": [list(map(int, lab)) for lab in self.labels],
            "generators": [enc(w) for w in self.generators],
            "bases": [[enc(v) for v in basis] for basis in self.bases],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def mub_family(d: int) -> MubFamily:
    """W_J = X Z^J (J = 1..d) and W_{d+1} = Z for prime d; X, Z, XZ otherwise."""
    if d < 2:
        raise BadDimension(f"dimension must be >= 2, got {d}")
    if is_prime(d):
        labels = [PauliLabel(1, J) for J in range(1, d + 1)] + [PauliLabel(0, 1)]
    else:
        labels = [PauliLabel(1, 0), PauliLabel(0, 1), PauliLabel(1, 1)]
    gens = np.array([_generator(d, lab) for lab in labels])
    bases = np.array([_eigenbasis(w) for w in gens])
    return MubFamily(d, gens, bases, tuple(labels))


class MubReport(NamedTuple):
    max_overlap_error: float
    max_orthogonality_error: float


def verify_mub(family: MubFamily) -> MubReport:
    d, k = family.d, family.kappa
    b = family.bases
    overlap = 0.0
    for J in range(k):
        for K in range(J + 1, k):
            g = np.abs(np.conj(b[J]) @ b[K].T) ** 2
            overlap = max(overlap, float(np.max(np.abs(g - 1.0 / d))))
    # Tr W_J^{-m} W_K^n = d delta_JK delta_mn over m, n = 1..d-1
    ops = family.powers[:, 1:].reshape(k * (d - 1), d, d)
    gram = np.einsum("aij,bij->ab", np.conj(ops), ops)
    ortho = float(np.max(np.abs(gram - d * np.eye(len(ops))))) / d
    return MubReport(overlap, ortho)


def bloch_coords(rho, family: MubFamily) -> np.ndarray:
    """Coefficients v[J, j-1] = Tr W_J^{-j} rho for j = 1..d-1."""
    if not family.complete:
        raise IncompleteFamily(
            f"only {family.kappa} of {family.d + 1} bases; expansion is not complete"
        )
    rho = as_matrix(rho)
    p = family.powers[:, 1:]
    # Tr(W^{-j} rho) = sum_ab conj(W^j)_ba rho_ba
    return np.einsum("Jjba,ba->Jj", np.conj(p), rho)


def reconstruct(v, family: MubFamily, trace: complex = 1.0) -> np.ndarray:
    """Inverse of :func:`bloch_coords`: (1/d)[tr I + sum v_Jj W_J^j]."""
    d = family.d
    v = np.asarray(v, dtype=complex)
    out = trace * np.eye(d, dtype=complex) + np.einsum("Jj,Jjab->ab", v, family.powers[:, 1:])
    return out / d


def commutation_phase(a, b, tol: float = 1e-10):
    """Scalar xi with A B A^dag B^dag = xi I, or None when no such scalar exists."""
    a, b = as_matrix(a), as_matrix(b)
    c = a @ b @ dagger(a) @ dagger(b)
    xi = np.trace(c) / c.shape[0]
    if np.max(np.abs(c - xi * np.eye(c.shape[0]))) > tol:
        return None
    return complex(xi / abs(xi))


def generators_unitary(family: MubFamily, tol: float = 1e-11) -> bool:
    return all(is_unitary(w, tol) for w in family.generators)
