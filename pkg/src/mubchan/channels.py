"""Channels constant on axes and their relatives.

Every channel object is a callable linear map on d x d matrices (it accepts
any matrix, not just densities) with a ``d`` attribute. That is all the
Choi, transfer-matrix and optimizer code needs.

Axis indices are 1-based in :func:`named_channel` and in the single-axis
mixture helpers, matching the usual labelling; arrays are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

from .linalg import (
    DimensionMismatch,
    NotDensity,
    as_matrix,
    dagger,
    is_density,
)
from .pauli import MubFamily, bloch_coords, is_prime, mub_family, reconstruct, weyl

CP_SLACK = 1e-12


class NotCP(ValueError):
    """Raised when multipliers violate complete positivity."""

    def __init__(self, inequality: str, violation: float):
        self.inequality = inequality
        self.violation = violation
        super().__init__(f"not CP: {inequality} violated by {violation:.3e}")


class ParamOutOfRange(ValueError):
    pass


class BadWeights(ValueError):
    pass


@lru_cache(maxsize=None)
def family_for(d: int) -> MubFamily:
    return mub_family(d)


def pauli_obu(d: int) -> np.ndarray:
    """All X^j Z^k with index j * d + k, so I comes first."""
    return np.array([weyl(d, (j, k)) for j in range(d) for k in range(d)])


class Channel:
    """Mixin giving every linear map a cached superoperator and its adjoint."""

    d: int

    def __call__(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    @cached_property
    def superop(self) -> np.ndarray:
        """S[(a,b),(i,j)] = <a| Phi(|i><j|) |b>, row-major vec convention."""
        d = self.d
        s = np.empty((d * d, d * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                e = np.zeros((d, d), dtype=complex)
                e[i, j] = 1.0
                s[:, i * d + j] = self(e).reshape(-1)
        return s

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        d = self.d
        return (dagger(self.superop) @ np.asarray(y, dtype=complex).reshape(-1)).reshape(d, d)


class CPSlacks(NamedTuple):
    lower: float  # sum(lam) + 1/(d-1)
    upper: float  # 1 + d min(lam) - sum(lam)


@dataclass(frozen=True, eq=False)
class AxisChannel(Channel):
    """Channel multiplying the Bloch coordinates of axis J by ``lam[J]``.

    For non-prime d only three axes exist and the channel also carries an
    explicit weight ``noise`` on the completely depolarizing map; off-axis
    coordinates are then multiplied by ``s``.
    """

    d: int
    lam: np.ndarray
    family: MubFamily = field(repr=False)
    noise: float = 0.0

    @property
    def kappa(self) -> int:
        return len(self.lam)

    @property
    def s(self) -> float:
        return (float(np.sum(self.lam)) + self.noise - 1.0) / (self.kappa - 1)

    @property
    def t(self) -> np.ndarray:
        return self.lam - self.s

    @property
    def a00(self) -> float:
        d = self.d
        return self.s + float(np.sum(self.t)) / d + self.noise / d**2

    @property
    def a(self) -> np.ndarray:
        """Weight of each axis in the Kraus form (a_00 + sum a_J = 1 for prime d)."""
        d = self.d
        return (d - 1) * (self.t / d + self.noise / d**2)

    def cp_slacks(self) -> dict:
        d = self.d
        if self.family.complete:
            lam = self.lam
            sl = CPSlacks(float(lam.sum() + 1.0 / (d - 1)), float(1 + d * lam.min() - lam.sum()))
            return sl._asdict()
        return {"a00": self.a00, "axis": float(np.min(self.t / d + self.noise / d**2))}

    def is_cp(self, tol: float = CP_SLACK) -> bool:
        return min(self.cp_slacks().values()) >= -tol

    def __call__(self, x):
        x = as_matrix(x)
        if self.family.complete:
            v = bloch_coords(x, self.family)
            return reconstruct(self.lam[:, None] * v, self.family, np.trace(x))
        d = self.d
        out = self.s * x + self.noise * np.trace(x) * np.eye(d) / d
        for L in range(self.kappa):
            p = self.family.powers[L]
            out = out + self.t[L] / d * np.einsum("jab,bc,jdc->ad", p, x, np.conj(p))
        return out

    def multiplier(self) -> np.ndarray:
        """Full multiplier over the (kappa, d-1) W-coordinates."""
        return np.repeat(self.lam[:, None], self.d - 1, axis=1).astype(complex)


@dataclass(frozen=True, eq=False)
class DiagonalChannel(Channel):
    """Channel acting as v[L, j] -> phi[L, j] v[L, j] on W-basis coordinates."""

    d: int
    phi: np.ndarray
    family: MubFamily = field(repr=False)

    def __call__(self, x):
        x = as_matrix(x)
        v = bloch_coords(x, self.family)
        return reconstruct(self.phi * v, self.family, np.trace(x))

    def preserves_hermiticity(self, tol: float = 1e-12) -> bool:
        phi = self.phi
        paired = np.conj(phi[:, ::-1])  # phi[L, d-j] for column j-1
        return bool(np.max(np.abs(phi - paired)) <= tol)

    @classmethod
    def from_axis(cls, ch: AxisChannel) -> "DiagonalChannel":
        return cls(ch.d, ch.multiplier(), ch.family)


@dataclass(frozen=True, eq=False)
class KrausSet(Channel):
    operators: np.ndarray

    @property
    def d(self) -> int:
        return self.operators.shape[-1]

    def __len__(self) -> int:
        return len(self.operators)

    def completeness_error(self) -> float:
        k = self.operators
        total = np.einsum("kba,kbc->ac", np.conj(k), k)
        return float(np.max(np.abs(total - np.eye(self.d))))

    def __call__(self, x):
        k = self.operators
        return np.einsum("kab,bc,kdc->ad", k, as_matrix(x), np.conj(k))


def apply_kraus(ks: KrausSet, rho) -> np.ndarray:
    return ks(rho)


@dataclass(frozen=True, eq=False)
class OneAxisChannel(Channel):
    """b I + a QC + (1 - a - b) N with the QC map in the standard basis."""

    d: int
    a: float
    b: float

    def __call__(self, x):
        x = as_matrix(x)
        tr = np.trace(x)
        return (
            self.b * x
            + self.a * np.diag(np.diag(x))
            + (1 - self.a - self.b) * tr * np.eye(self.d) / self.d
        )

    def to_axis(self, axis: int | None = None) -> AxisChannel:
        """Axis form with the special axis at 1-based index ``axis``.

        The default is the Z axis (the last one for prime d), the only choice
        for which the two forms are the same map rather than unitarily
        equivalent ones.
        """
        fam = family_for(self.d)
        if not fam.complete:
            raise ValueError("axis form needs a complete MUB family")
        axis = fam.kappa if axis is None else axis
        lam = np.full(fam.kappa, self.b)
        lam[axis - 1] += self.a
        return AxisChannel(self.d, lam, fam)


@dataclass(frozen=True, eq=False)
class WernerHolevo(Channel):
    """W(X) = (Tr(X) I - X^T) / (d - 1)."""

    d: int

    def __call__(self, x):
        x = as_matrix(x)
        return (np.trace(x) * np.eye(self.d) - x.T) / (self.d - 1)


def werner_holevo(d: int) -> WernerHolevo:
    if d < 2:
        raise ValueError("d must be >= 2")
    return WernerHolevo(d)


@dataclass(frozen=True, eq=False)
class TensorChannel(Channel):
    """Phi (x) Omega acting on (d1 d2) x (d1 d2) matrices."""

    first: Channel
    second: Channel

    @property
    def d(self) -> int:
        return self.first.d * self.second.d

    def __call__(self, x):
        d1, d2 = self.first.d, self.second.d
        t = as_matrix(x).reshape(d1, d2, d1, d2).transpose(0, 2, 1, 3).reshape(d1 * d1, d2 * d2)
        out = self.first.superop @ t @ self.second.superop.T
        return out.reshape(d1, d1, d2, d2).transpose(0, 2, 1, 3).reshape(d1 * d2, d1 * d2)

    def adjoint(self, y):
        d1, d2 = self.first.d, self.second.d
        t = as_matrix(y).reshape(d1, d2, d1, d2).transpose(0, 2, 1, 3).reshape(d1 * d1, d2 * d2)
        out = dagger(self.first.superop) @ t @ np.conj(self.second.superop)
        return out.reshape(d1, d1, d2, d2).transpose(0, 2, 1, 3).reshape(d1 * d2, d1 * d2)

    @cached_property
    def superop(self) -> np.ndarray:
        d1, d2 = self.first.d, self.second.d
        s = np.kron(self.first.superop, self.second.superop)
        # kron orders (a1 b1 a2 b2); reorder to (a1 a2 b1 b2) on both sides
        s = s.reshape(d1, d1, d2, d2, d1, d1, d2, d2)
        s = s.transpose(0, 2, 1, 3, 4, 6, 5, 7)
        n = (d1 * d2) ** 2
        return s.reshape(n, n)


def tensor(first: Channel, second: Channel) -> TensorChannel:
    return TensorChannel(first, second)


def axis_channel(d: int, lam, checked: bool = True, noise: float = 0.0) -> AxisChannel:
    """Build an axis channel from its multipliers.

    With ``checked`` the CP inequalities must hold within 1e-12; the
    unchecked form is for scans that cross the CP boundary.
    """
    fam = family_for(d)
    lam = np.asarray(lam, dtype=float).reshape(-1)
    if len(lam) != fam.kappa:
        raise ValueError(f"expected {fam.kappa} multipliers for d={d}, got {len(lam)}")
    if fam.complete and noise != 0.0:
        raise ValueError("noise weight is only meaningful when fewer than d+1 bases exist")
    ch = AxisChannel(d, lam, fam, float(noise))
    if checked:
        for name, val in ch.cp_slacks().items():
            if val < -CP_SLACK:
                raise NotCP(name, -val)
    return ch


def _kappa(d: int) -> int:
    return d + 1 if is_prime(d) else 3


def named_channel(kind: str, d: int, L: int = 1, lam: float | None = None, a=None, b=None):
    """Axis channels from the standard subclasses; ``L`` is a 1-based axis."""
    k = _kappa(d)
    if not 1 <= L <= k:
        raise ParamOutOfRange(f"axis {L} out of range 1..{k}")
    e = np.zeros(k)
    e[L - 1] = 1.0

    def need(x, name):
        if x is None:
            raise ParamOutOfRange(f"{kind} needs parameter {name}")
        return float(x)

    if kind == "identity":
        v = np.ones(k)
    elif kind == "noise":
        v = np.zeros(k)
    elif kind == "qc":
        v = e
    elif kind == "phase_damping":
        x = need(lam, "lam")
        v = x * (1 - e) + e
    elif kind == "extreme_x":
        v = -(1 - e) / (d - 1) + e
    elif kind == "xeb":
        v = -e / (d - 1)
    elif kind == "yeb":
        v = (d - 2) / (2 * (d - 1)) * e - (1 - e) / (2 * (d - 1))
    elif kind == "depolarizing":
        v = np.full(k, need(lam, "lam"))
    elif kind == "max_squashed":
        x = need(lam, "lam")
        v = x * (1 - e) + (d * x - 1) / (d - 1) * e
    elif kind == "depolarize_from_x":
        x = need(lam, "lam")
        v = x * e - x / (d - 1) * (1 - e)
    elif kind == "one_axis":
        aa, bb = need(a, "a"), need(b, "b")
        v = np.full(k, bb) + aa * e
    else:
        raise ParamOutOfRange(f"unknown channel kind {kind!r}")
    try:
        return axis_channel(d, v, checked=True)
    except NotCP as exc:
        raise ParamOutOfRange(str(exc)) from exc


def apply(ch: Channel, rho) -> np.ndarray:
    """Apply a channel to a density matrix, returning a Hermitian result."""
    rho = as_matrix(rho)
    if rho.shape != (ch.d, ch.d):
        raise DimensionMismatch(f"state is {rho.shape}, channel acts on d={ch.d}")
    if not is_density(rho, 1e-9):
        raise NotDensity("input is not a density matrix")
    out = ch(rho)
    return 0.5 * (out + dagger(out))


def kraus(ch: AxisChannel, tol: float = 1e-15) -> KrausSet:
    """Kraus operators sqrt(a00) I and sqrt(a_J/(d-1)) W_J^j; zero-weight ones dropped."""
    d = ch.d
    if not ch.is_cp():
        sl = ch.cp_slacks()
        name = min(sl, key=sl.get)
        raise NotCP(name, -sl[name])
    ops = []
    if ch.a00 > tol:
        ops.append(np.sqrt(ch.a00) * np.eye(d, dtype=complex))
    if ch.family.complete:
        for J in range(ch.kappa):
            w = ch.a[J] / (d - 1)
            if w > tol:
                ops.extend(np.sqrt(w) * ch.family.powers[J, 1:])
    else:
        # Pauli form: each W_L^j gets t_L/d + u/d^2, every other Pauli u/d^2
        weights = {}
        for j in range(d):
            for kk in range(d):
                if j or kk:
                    weights[(j, kk)] = ch.noise / d**2
        lab = ch.family.labels
        for L in range(ch.kappa):
            j0, k0 = lab[L]
            for m in range(1, d):
                weights[((j0 * m) % d, (k0 * m) % d)] += ch.t[L] / d
        for lbl, w in sorted(weights.items()):
            if w > tol:
                ops.append(np.sqrt(w) * weyl(d, lbl))
    return KrausSet(np.array(ops))


def transfer_matrix(ch: Channel, basis: np.ndarray | None = None) -> np.ndarray:
    """T[s, t] = (1/d) Tr V_s^dag Phi(V_t) in an orthogonal unitary basis.

    Default basis: (I, W_1^1..W_1^{d-1}, W_2^1, ...) for prime d and the
    generalized Pauli basis otherwise.
    """
    d = ch.d
    if basis is None:
        fam = family_for(d)
        basis = fam.obu() if fam.complete else pauli_obu(d)
    images = np.array([ch(v) for v in basis])
    return np.einsum("sab,tab->st", np.conj(basis), images) / d


def single_axis_mixture(J: int, weights, d: int) -> DiagonalChannel:
    """M_J(rho) = sum_j c_j W_J^j rho W_J^{-j}, returned in diagonal form."""
    if not is_prime(d):
        raise ValueError("single-axis mixtures need prime d")
    c = np.asarray(weights, dtype=float)
    if len(c) != d or np.any(c < -1e-15) or abs(c.sum() - 1) > 1e-12:
        raise BadWeights(f"need {d} non-negative weights summing to 1, got {c}")
    fam = family_for(d)
    ks = KrausSet(np.sqrt(np.clip(c, 0, None))[:, None, None] * fam.powers[J - 1])
    t = transfer_matrix(ks, fam.obu())
    off = np.max(np.abs(t - np.diag(np.diag(t))))
    if off > 1e-10:  # pragma: no cover - holds for every prime d
        raise ValueError(f"mixture is not diagonal (off-diagonal {off:.2e})")
    phi = np.diag(t)[1:].reshape(fam.kappa, d - 1)
    return DiagonalChannel(d, phi, fam)


def _phi(ch) -> np.ndarray:
    if isinstance(ch, AxisChannel):
        return ch.multiplier()
    return np.asarray(ch.phi)


def compose(psi: AxisChannel | DiagonalChannel, m: AxisChannel | DiagonalChannel) -> DiagonalChannel:
    """psi after m; both diagonal in the same basis, so multipliers multiply."""
    return DiagonalChannel(psi.d, _phi(psi) * _phi(m), psi.family)


def mix(x: float, m, psi) -> DiagonalChannel:
    """x m + (1 - x) psi."""
    if not 0 <= x <= 1:
        raise ValueError("mixing weight must lie in [0, 1]")
    return DiagonalChannel(psi.d, x * _phi(m) + (1 - x) * _phi(psi), psi.family)


def mix_axis(x: float, first: AxisChannel, second: AxisChannel) -> AxisChannel:
    return axis_channel(first.d, x * first.lam + (1 - x) * second.lam, checked=False)


class OneAxisRegions:
    """Region predicates for b I + a QC + (1 - a - b) N in dimension d."""

    def __init__(self, d: int, tol: float = 1e-12):
        self.d = d
        self.tol = tol

    def cp_slacks(self, a: float, b: float) -> tuple[float, float, float]:
        d = self.d
        ab = 1 - a - b
        ae = a * (d - 1) - b + 1
        be = a + b * (d + 1) + 1 / (d - 1)
        return ab, ae, be

    def eb_slack(self, a: float, b: float) -> float:
        """(1 - a - b) - d |b|; nonnegative on the PPT (= EB) side."""
        return (1 - a - b) - self.d * abs(b)

    def is_cp(self, a: float, b: float) -> bool:
        return min(self.cp_slacks(a, b)) >= -self.tol

    def is_eb(self, a: float, b: float) -> bool:
        return self.is_cp(a, b) and self.eb_slack(a, b) >= -self.tol

    def is_fukuda_multiplicative(self, a: float, b: float) -> bool:
        d, tol = self.d, self.tol
        if a > 0 and a + b * d >= -tol:
            return True
        if a < 0 and -b - 1 / (d * d - 1) - tol <= a <= -b * d + tol:
            return True
        return False

    def points(self) -> dict:
        """Labelled (a, b) points of the one-axis plane."""
        d = self.d
        return {
            "A": (0.0, 1.0),
            "B": (d / (d - 1), -1 / (d - 1)),
            "E": (-1 / (d - 1), 0.0),
            "Q": (1.0, 0.0),
            "R": (-1 / d, 1 / d),
            "Y": (0.5, -1 / (2 * (d - 1))),
            "X": (1 / (d * (d - 1)), -1 / (d * (d - 1))),
            "N": (0.0, 0.0),
            "P": (0.0, 1 / (d + 1)),
            "D": (0.0, -1 / (d * d - 1)),
            "T": (d / (2 * d - 1), -1 / (2 * d - 1)),
            "Z": (-d / (d * d - d + 1), 1 / (d * d - d + 1)),
        }


def one_axis_regions(d: int) -> OneAxisRegions:
    return OneAxisRegions(d)
