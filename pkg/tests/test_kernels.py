import numpy as np
import pytest

from vexlab import _kernels


@pytest.fixture
def coeffs(rng):
    r_max = 3000
    c_re = rng.standard_normal(r_max + 1) / np.arange(1, r_max + 2)
    c_im = rng.standard_normal(r_max + 1) / np.arange(1, r_max + 2)
    return c_re, c_im


def test_scan_paths_agree(coeffs, rng):
    c_re, c_im = coeffs
    xs = np.sort(rng.uniform(0.0, 2 * np.pi, size=37))
    m_np, a_np = _kernels.scan_running_max_numpy(c_re, c_im, xs, 10)
    m_nb, a_nb = _kernels.scan_running_max(c_re, c_im, xs, 10)
    assert np.allclose(m_np, m_nb, rtol=0, atol=1e-10)
    assert np.array_equal(a_np, a_nb)


def test_checkpoint_paths_agree(coeffs, rng):
    c_re, c_im = coeffs
    xs = np.sort(rng.uniform(0.0, 2 * np.pi, size=21))
    checks = np.array([0, 17, 100, 1001, 2999], dtype=np.int64)
    v_np = _kernels.abs_at_checkpoints_numpy(c_re, c_im, xs, checks)
    v_nb = _kernels.abs_at_checkpoints(c_re, c_im, xs, checks)
    assert np.allclose(v_np, v_nb, rtol=0, atol=1e-10)


def test_checkpoints_match_direct_summation(coeffs):
    c_re, c_im = coeffs
    x = 1.234
    checks = np.array([5, 50, 500], dtype=np.int64)
    vals = _kernels.abs_at_checkpoints_numpy(c_re, c_im, np.array([x]), checks)[:, 0]
    js = np.arange(1, 501)
    terms = 2.0 * (c_re[1:501] * np.cos(js * x) - c_im[1:501] * np.sin(js * x))
    sums = c_re[0] + np.cumsum(terms)
    for m, v in zip(checks, vals):
        assert v == pytest.approx(abs(sums[m - 1]), abs=1e-11)


def test_maximal_paths_agree(rng):
    breaks = np.concatenate([[0.0], np.sort(rng.uniform(0.0, 1.0, 30)), [1.0]])
    seg_vals = np.abs(rng.standard_normal(31))
    prefix = np.concatenate([[0.0], np.cumsum(seg_vals * np.diff(breaks))])
    xs = np.sort(rng.uniform(0.0, 1.0, size=25))
    v_np = _kernels.step_maximal_sup_numpy(breaks, prefix, seg_vals, xs)
    v_nb = _kernels.step_maximal_sup(breaks, prefix, seg_vals, xs)
    assert np.allclose(v_np, v_nb, rtol=0, atol=1e-12)


def test_rotation_resync_accuracy():
    # over many terms the rotation recurrence with periodic resync stays at
    # the 1e-12 scale against direct trig evaluation
    r_max = 50_000
    c_re = np.zeros(r_max + 1)
    c_im = np.zeros(r_max + 1)
    c_re[r_max] = 1.0  # only the last term contributes
    x = 2.031
    vals = _kernels.abs_at_checkpoints_numpy(c_re, c_im, np.array([x]), np.array([r_max], dtype=np.int64))
    expected = abs(2.0 * np.cos(r_max * x))
    assert vals[0, 0] == pytest.approx(expected, abs=5e-11)


def test_env_flag_documented():
    import vexlab._kernels as mod

    assert "VEXLAB_NO_NUMBA" in mod.__doc__
