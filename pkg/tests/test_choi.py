import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mubchan.channels import NotCP, OneAxisChannel, OneAxisRegions, axis_channel, kraus, named_channel, werner_holevo
from mubchan.choi import (
    BOUND_ENTANGLED,
    EB,
    NOT_EB,
    UNKNOWN,
    BadParams,
    WrongDimension,
    ccn,
    choi,
    choi_d3_closed,
    choi_from_kraus,
    choi_one_axis,
    eb_classify,
    face_channel,
    face_extremality_probe,
    gamma_block,
    known_eb_vertices,
    ppt,
    ppt3_closed,
    separable_decomp_R,
    separable_decomp_Y,
)

from .conftest import random_cp_lambda


def test_identity_choi_is_maximally_entangled():
    c = choi(named_channel("identity", 3)).matrix
    beta = np.eye(3).reshape(9) / np.sqrt(3)
    assert np.allclose(c, np.outer(beta, beta), atol=1e-14)
    assert np.isclose(np.trace(c), 1)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 2**32 - 1))
def test_choi_agrees_with_kraus(d, seed):
    ch = axis_channel(d, random_cp_lambda(np.random.default_rng(seed), d))
    c = choi(ch)
    assert np.max(np.abs(c.matrix - choi_from_kraus(kraus(ch).operators).matrix)) <= 1e-12
    assert abs(np.trace(c.matrix) - 1) <= 1e-12
    assert c.eigenvalues()[-1] >= -1e-12
    # Tr_B of the Choi matrix is I/d
    red = np.einsum("ikjk->ij", c.matrix.reshape(d, d, d, d))
    assert np.allclose(red, np.eye(d) / d, atol=1e-12)


def test_closed_form_qutrit(rng):
    for _ in range(20):
        lam = random_cp_lambda(rng, 3)
        assert np.max(np.abs(choi_d3_closed(lam).matrix - choi(axis_channel(3, lam)).matrix)) <= 1e-12
    with pytest.raises(WrongDimension):
        choi_d3_closed([0.1] * 5)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_one_axis_form(d):
    for a, b in [(0.3, 0.1), (-0.2, 0.15), (0.5, -0.1)]:
        target = choi_one_axis(d, a, b).matrix
        assert np.max(np.abs(choi(OneAxisChannel(d, a, b)).matrix - target)) <= 1e-12
        assert np.max(np.abs(choi(OneAxisChannel(d, a, b).to_axis()).matrix - target)) <= 1e-12


def test_ppt_examples():
    assert ppt(choi(named_channel("identity", 3))).min_eigenvalue == pytest.approx(-1 / 3)
    assert ppt(choi(named_channel("noise", 3))).is_ppt
    # the antisymmetric Werner-Holevo map is entangling
    assert ppt(choi(werner_holevo(3))).min_eigenvalue == pytest.approx(-1 / 3)


def test_ppt3_closed_values():
    r = ppt3_closed([0.27, 0.27, -0.27, -0.27])
    assert r.is_ppt
    assert r.slack_quadratic == pytest.approx(1 - 12 * 0.27**2)
    assert not ppt3_closed([0.3, 0.3, -0.3, -0.3]).is_ppt
    with pytest.raises(WrongDimension):
        ppt3_closed([0.1] * 3)


def test_ppt3_closed_matches_numeric(rng):
    for _ in range(200):
        lam = random_cp_lambda(rng, 3)
        closed = ppt3_closed(lam)
        if min(abs(closed.slack_sum), abs(closed.slack_quadratic)) < 1e-8:
            continue
        assert closed.is_ppt == ppt(choi(axis_channel(3, lam))).is_ppt


def test_ccn_values(rng):
    c = ccn(axis_channel(3, [0.27, 0.27, -0.27, -0.27]))
    assert c.T_value == pytest.approx(1.08)
    assert not c.is_ccn
    # the generic singular-value path agrees with the axis shortcut
    for _ in range(10):
        ch = axis_channel(3, random_cp_lambda(rng, 3))
        assert ccn(kraus(ch)).trace_norm == pytest.approx(1 + 2 * np.abs(ch.lam).sum(), abs=1e-10)
    assert ccn(werner_holevo(3)).trace_norm == pytest.approx(5.0)


@pytest.mark.parametrize(
    "lam, verdict",
    [
        ([0.27, 0.27, -0.27, -0.27], BOUND_ENTANGLED),
        ([0.3, 0.3, -0.3, -0.3], NOT_EB),
        ([-0.125] * 4, EB),
        ([0.4, -0.2, -0.2, -0.2], EB),
        ([0.1, 0.1, -0.1, -0.1], EB),
        ([0.5, 0.5, 0.0, 0.0], EB),
        ([0.45, 0.45, 0.45, 0.2], NOT_EB),
        ([1, 1, 1, 1], NOT_EB),
        ([0, 0, 0, 0], EB),
    ],
)
def test_eb_classify(lam, verdict):
    assert eb_classify(axis_channel(3, lam)).verdict == verdict


def test_eb_classify_rejects_noncp():
    with pytest.raises(NotCP):
        eb_classify(axis_channel(3, [0.4, 0.4, -0.4, -0.4], checked=False))


def test_verdicts_are_consistent(rng):
    for _ in range(200):
        ch = axis_channel(3, random_cp_lambda(rng, 3))
        cls = eb_classify(ch)
        p = ppt(choi(ch)).is_ppt
        if cls.verdict == EB:
            assert p and ccn(ch).is_ccn
        elif cls.verdict in (BOUND_ENTANGLED, UNKNOWN):
            assert p
        if not p:
            assert cls.verdict == NOT_EB


def test_hull_vertices_are_eb():
    for name, lam in known_eb_vertices(3).items():
        ch = axis_channel(3, lam)
        assert ppt(choi(ch)).is_ppt, name
        assert ccn(ch).is_ccn, name


@pytest.mark.parametrize("d", [2, 3, 5])
def test_separable_R(d):
    dec = separable_decomp_R(d)
    assert len(dec) == 3 ** (d - 1)
    assert np.all(dec.weights > 0)
    target = choi_one_axis(d, *OneAxisRegions(d).points()["R"]).matrix
    assert np.max(np.abs(dec.matrix() - target)) <= 1e-12
    with pytest.raises(BadParams):
        separable_decomp_R(d, m=2)


@pytest.mark.parametrize("d", [2, 3])
def test_separable_Y(d):
    dec = separable_decomp_Y(d)
    assert len(dec) == 2 * d * (d - 1)
    assert np.all(dec.weights > 0)
    target = choi_one_axis(d, *OneAxisRegions(d).points()["Y"]).matrix
    assert np.max(np.abs(dec.matrix() - target)) <= 1e-12


def test_gamma_block():
    g = gamma_block(3, 0, 2)
    assert np.isclose(np.trace(g), 4)
    assert np.linalg.eigvalsh(g)[0] >= -1e-14


@pytest.mark.parametrize("d", [3, 5])
def test_face_channels(rng, d):
    assert face_extremality_probe(d, np.full(d, 1 / d)).is_ppt
    for _ in range(10):
        a = rng.dirichlet(np.ones(d))
        assert not face_extremality_probe(d, a).is_ppt
    with pytest.raises(BadParams):
        face_channel(d, np.full(d, 0.5))
    with pytest.raises(WrongDimension):
        face_channel(4, np.full(4, 0.25))
