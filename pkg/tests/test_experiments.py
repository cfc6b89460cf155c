"""Quarantined numerical probes; a failure here is a finding, not a regression.

Run alone with ``pytest -m experiment``.
"""

import numpy as np
import pytest

from mubchan.channels import axis_channel
from mubchan.linalg import entropy_of_spectrum, schatten_norm_of_spectrum
from mubchan.purity import OptimizerConfig, axis_output_spectrum, optimize_nu_p, optimize_smin

pytestmark = pytest.mark.experiment


def nonnegative_cp(rng, d=3):
    while True:
        lam = rng.uniform(0, 1, d + 1)
        ch = axis_channel(d, lam, checked=False)
        if ch.is_cp():
            return ch


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, np.inf])
def test_nonnegative_multipliers_attain_at_axis(p):
    rng = np.random.default_rng(1000 + int(10 * min(p, 9)))
    cfg = OptimizerConfig(restarts=16)
    for _ in range(20):
        ch = nonnegative_cp(rng)
        L = int(np.argmax(ch.lam)) + 1
        closed = schatten_norm_of_spectrum(axis_output_spectrum(ch, L), p)
        assert optimize_nu_p(ch, p, cfg).value == pytest.approx(closed, abs=1e-7)


def test_nonnegative_multipliers_entropy_at_axis():
    rng = np.random.default_rng(2000)
    cfg = OptimizerConfig(restarts=16)
    for _ in range(20):
        ch = nonnegative_cp(rng)
        L = int(np.argmax(ch.lam)) + 1
        closed = entropy_of_spectrum(axis_output_spectrum(ch, L))
        assert optimize_smin(ch, cfg).value == pytest.approx(closed, abs=1e-7)
