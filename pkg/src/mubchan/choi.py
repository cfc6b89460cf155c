"""Choi matrices, PPT and cross-norm tests, and entanglement-breaking verdicts."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import nnls

from .channels import (
    AxisChannel,
    Channel,
    NotCP,
    OneAxisRegions,
    axis_channel,
    transfer_matrix,
)
from .linalg import eigvalsh_desc, ket, kron, partial_transpose, singular_values
from .pauli import is_prime, omega

PPT_TOL = 1e-10
HULL_TOL = 1e-10


class WrongDimension(ValueError):
    pass


class BadParams(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """(I x Phi)|beta><beta| with unit trace; rows indexed i_A * d + i_B."""

    d: int
    matrix: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return eigvalsh_desc(self.matrix)


def choi(ch: Channel) -> ChoiMatrix:
    d = ch.d
    # (1/d) sum_jk |j><k| (x) Phi(|j><k|), read off the superoperator columns
    blocks = ch.superop.T.reshape(d, d, d, d) / d  # [j, k, a, b]
    m = blocks.transpose(0, 2, 1, 3).reshape(d * d, d * d)
    return ChoiMatrix(d, m)


def choi_from_kraus(ops) -> ChoiMatrix:
    """(1/d) sum_s vec(K_s) vec(K_s)^dag, the Kraus-side assembly."""
    ops = np.asarray(ops, dtype=complex)
    d = ops.shape[-1]
    # |V_s> = sum_j |j> (x) K_s|j>, so component (j, a) is K_s[a, j]
    vecs = ops.transpose(0, 2, 1).reshape(len(ops), d * d)
    return ChoiMatrix(d, np.einsum("si,sj->ij", vecs, np.conj(vecs)) / d)


def choi_one_axis(d: int, a: float, b: float) -> ChoiMatrix:
    """(1/d^2)[(1-a-b) I + b d^2 |beta><beta| + a d sum_k |kk><kk|]."""
    beta = np.eye(d).reshape(d * d) / np.sqrt(d)
    diag = np.zeros(d * d)
    diag[:: d + 1] = 1.0
    m = (1 - a - b) * np.eye(d * d) + b * d * d * np.outer(beta, beta) + a * d * np.diag(diag)
    return ChoiMatrix(d, m.astype(complex) / d**2)


def choi_d3_closed(lam) -> ChoiMatrix:
    """Explicit qutrit Choi matrix of an axis channel.

    Uses u = l1 + l2 + l3 and z = l1 w^2 + l2 w + l3 (the conjugate of the
    printed combination, which is what this basis convention produces).
    """
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (4,):
        raise WrongDimension("the closed form is for d = 3 (four multipliers)")
    w = omega(3)
    u = lam[0] + lam[1] + lam[2]
    z = lam[0] * w**2 + lam[1] * w + lam[2]
    zb = np.conj(z)
    p, q = 1 + 2 * lam[3], 1 - lam[3]
    m = np.array(
        [
            [p, 0, 0, 0, u, 0, 0, 0, u],
            [0, q, 0, 0, 0, z, zb, 0, 0],
            [0, 0, q, zb, 0, 0, 0, z, 0],
            [0, 0, z, q, 0, 0, 0, zb, 0],
            [u, 0, 0, 0, p, 0, 0, 0, u],
            [0, zb, 0, 0, 0, q, z, 0, 0],
            [0, z, 0, 0, 0, zb, q, 0, 0],
            [0, 0, zb, z, 0, 0, 0, q, 0],
            [u, 0, 0, 0, u, 0, 0, 0, p],
        ],
        dtype=complex,
    )
    return ChoiMatrix(3, m / 9)


class PPTResult(NamedTuple):
    is_ppt: bool
    min_eigenvalue: float


def ppt(c) -> PPTResult:
    m = c.matrix if isinstance(c, ChoiMatrix) else np.asarray(c, dtype=complex)
    d = int(round(np.sqrt(m.shape[0])))
    lo = float(eigvalsh_desc(partial_transpose(m, d, d, subsystem=1))[-1])
    return PPTResult(lo >= -PPT_TOL, lo)


class PPT3(NamedTuple):
    is_ppt: bool
    slack_sum: float  # 1 - sum(lam)
    slack_quadratic: float  # 1 + S + S^2 - 3 sum(lam^2)


def ppt3_closed(lam, tol: float = 1e-12) -> PPT3:
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (4,):
        raise WrongDimension("closed-form PPT test needs d = 3 (four multipliers)")
    s = float(lam.sum())
    s1 = 1 - s
    s2 = 1 + s + s * s - 3 * float(np.sum(lam**2))
    return PPT3(min(s1, s2) >= -tol, s1, s2)


class CCN(NamedTuple):
    T_value: float
    trace_norm: float
    is_ccn: bool


def ccn(ch: Channel, tol: float = 1e-12) -> CCN:
    """Cross-norm test: the transfer matrix trace norm must not exceed d."""
    d = ch.d
    if isinstance(ch, AxisChannel) and ch.family.complete:
        t = float(np.sum(np.abs(ch.lam)))
        norm = 1 + (d - 1) * t
    else:
        norm = float(np.sum(singular_values(transfer_matrix(ch))))
        t = (norm - 1) / (d - 1)
    return CCN(t, norm, norm <= d + tol * d)


EB, NOT_EB, BOUND_ENTANGLED, UNKNOWN = "EB", "NotEB", "BoundEntangled", "UnknownPPT"


@dataclass(frozen=True)
class EbClassification:
    verdict: str
    evidence: str
    ppt: bool | None = None
    ccn: bool | None = None
    hull_weights: dict | None = field(default=None, compare=False)


def _ppt_axis(ch: AxisChannel) -> bool:
    if ch.d == 3 and ch.family.complete:
        return ppt3_closed(ch.lam).is_ppt
    return ppt(choi(ch)).is_ppt


def known_eb_vertices(d: int) -> dict:
    """EB multipliers: the E, R, Q, Y points of every axis, plus N."""
    pts = OneAxisRegions(d).points()
    k = d + 1
    out = {"N": np.zeros(k)}
    for L in range(k):
        for name in "ERQY":
            a, b = pts[name]
            v = np.full(k, b)
            v[L] += a
            out[f"{name}{L + 1}"] = v
    return out


def hull_membership(lam, vertices: dict, tol: float = HULL_TOL):
    """Convex weights over ``vertices`` reproducing ``lam``, or None."""
    names = list(vertices)
    v = np.array([vertices[n] for n in names]).T
    a = np.vstack([v, np.ones(len(names))])
    rhs = np.append(np.asarray(lam, dtype=float), 1.0)
    w, res = nnls(a, rhs)
    if res > tol:
        return None
    return {n: float(x) for n, x in zip(names, w) if x > 1e-14}


def eb_classify(ch: AxisChannel, tol: float = 1e-12) -> EbClassification:
    if not ch.is_cp():
        sl = ch.cp_slacks()
        name = min(sl, key=sl.get)
        raise NotCP(name, -sl[name])
    lam = ch.lam
    c = ccn(ch, tol)
    if np.all(lam <= tol):
        return EbClassification(EB, "all multipliers nonpositive", ccn=c.is_ccn)
    if np.all(lam >= -tol):
        ok = lam.sum() <= 1 + tol
        return EbClassification(EB if ok else NOT_EB, "all multipliers nonnegative: sum <= 1", ccn=c.is_ccn)
    _, counts = np.unique(np.round(lam, 12), return_counts=True)
    if ch.family.complete and counts.max() >= ch.d:
        return EbClassification(EB if c.is_ccn else NOT_EB, "one symmetry axis: EB iff CCN", ccn=c.is_ccn)
    p = _ppt_axis(ch)
    if not c.is_ccn:
        if p:
            return EbClassification(BOUND_ENTANGLED, "PPT but CCN violated", p, False)
        return EbClassification(NOT_EB, "PPT and CCN both violated", p, False)
    if not p:
        return EbClassification(NOT_EB, "PPT violated", p, True)
    if ch.family.complete and is_prime(ch.d):
        w = hull_membership(lam, known_eb_vertices(ch.d))
        if w is not None:
            return EbClassification(EB, "convex hull of known EB points", p, True, w)
    return EbClassification(UNKNOWN, "PPT and CCN hold with mixed signs", p, True)


@dataclass(frozen=True, eq=False)
class SeparableDecomposition:
    """Terms (w_i, u_i, v_i) with sum_i w_i |u_i v_i><u_i v_i| = target."""

    weights: np.ndarray
    first: np.ndarray
    second: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)

    def matrix(self) -> np.ndarray:
        n = len(self.weights)
        vecs = np.einsum("si,sj->sij", self.first, self.second).reshape(n, -1)
        return np.einsum("s,si,sj->ij", self.weights, vecs, np.conj(vecs))


def separable_decomp_R(d: int, m: int = 3) -> SeparableDecomposition:
    """phi_x (x) conj(phi_x) over x_1 = 1 and x_2..x_d in the m-th roots of unity."""
    if d < 2 or m < 3:
        raise BadParams(f"need d >= 2 and m >= 3, got d={d}, m={m}")
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    first = []
    for xs in itertools.product(roots, repeat=d - 1):
        first.append(np.concatenate([[1.0], xs]) / np.sqrt(d))
    first = np.array(first)
    n = len(first)
    return SeparableDecomposition(np.full(n, 1.0 / n), first, np.conj(first))


def separable_decomp_Y(d: int) -> SeparableDecomposition:
    """Four product terms per pair j < k, each block summing to gamma_jk.

    gamma_jk = |jk><jk| + |kj><kj| + (|jj> - |kk>)(<jj| - <kk|) splits into
    c+ c+, c- c-, a+ a-, a- a+ with c = (e_j +- i e_k)/sqrt2 and
    a = (e_j +- e_k)/sqrt2, all with unit weight.
    """
    if d < 2:
        raise BadParams("need d >= 2")
    r = 1 / np.sqrt(2)
    first, second = [], []
    for j, k in itertools.combinations(range(d), 2):
        ej, ek = ket(d, j), ket(d, k)
        cp, cm = r * (ej + 1j * ek), r * (ej - 1j * ek)
        ap, am = r * (ej + ek), r * (ej - ek)
        first += [cp, cm, ap, am]
        second += [cp, cm, am, ap]
    n = len(first)
    return SeparableDecomposition(np.full(n, 1.0 / (2 * d * (d - 1))), np.array(first), np.array(second))


def gamma_block(d: int, j: int, k: int) -> np.ndarray:
    ej, ek = ket(d, j), ket(d, k)
    jk, kj = kron(ej, ek), kron(ek, ej)
    diff = kron(ej, ej) - kron(ek, ek)
    return np.outer(jk, jk) + np.outer(kj, kj) + np.outer(diff, diff)


def face_channel(d: int, a, K: int | None = None, checked: bool = True) -> AxisChannel:
    """sum_{J != K} a_J Psi_J^X: multiplier a_J - (1 - a_J)/(d-1) off K, -1/(d-1) on K."""
    if not is_prime(d):
        raise WrongDimension("face channels need prime d")
    a = np.asarray(a, dtype=float)
    if len(a) != d or np.any(a < -1e-15) or abs(a.sum() - 1) > 1e-12:
        raise BadParams(f"need {d} non-negative weights summing to 1")
    K = d + 1 if K is None else K
    others = [J for J in range(d + 1) if J != K - 1]
    lam = np.full(d + 1, -1.0 / (d - 1))
    lam[others] = a - (1 - a) / (d - 1)
    return axis_channel(d, lam, checked=checked)


def face_extremality_probe(d: int, a, K: int | None = None) -> PPTResult:
    return ppt(choi(face_channel(d, a, K)))

