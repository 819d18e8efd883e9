import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import make_scan
from polgpr.core import AlignmentError, Bscan, SurveyGrid, TargetModel
from polgpr.dcpd import ccp, detect, shift_traces
from polgpr.preprocess import mean_subtract
from polgpr.simulator import apex_indices, synthesize_pair, WaveletSpec


def pair(a, b):
    return make_scan(a, "HV", "I"), make_scan(b, "HV", "II")


def test_ccp_examples():
    c = ccp(*pair([[3.0, -2.0], [0, 0]], [[4.0, 0.0], [0, 0]]))
    assert c.data[0, 0] == 5.0
    assert c.data[0, 1] == 2.0
    assert c.channel == "CCP"


def test_ccp_alignment_errors():
    b1 = make_scan(np.ones((3, 3)), "HV", "I")
    with pytest.raises(AlignmentError):
        ccp(b1, make_scan(np.ones((3, 4)), "HV", "II"))
    with pytest.raises(AlignmentError):
        ccp(b1, make_scan(np.ones((3, 3)), "HH", "II"))
    with pytest.raises(AlignmentError):
        ccp(b1, make_scan(np.ones((3, 3)), "HV", "I"))


@given(st.integers(0, 2**31), st.floats(1e-3, 1e3))
def test_ccp_properties(seed, c):
    g = np.random.default_rng(seed)
    x, y = g.standard_normal((5, 4)), g.standard_normal((5, 4))
    a = ccp(*pair(x, y)).data
    assert np.all(a >= 0)
    assert np.array_equal(a, ccp(*pair(y, x)).data)
    assert np.array_equal(ccp(*pair(x, 0 * x)).data, np.abs(x))
    assert np.allclose(ccp(*pair(c * x, c * y)).data, c * a, rtol=1e-14)


def test_ccp_apex_constant_over_orientation():
    peaks = []
    for theta in range(0, 180, 10):
        f1, f2 = synthesize_pair(TargetModel(theta=float(theta), amplitude=1.0))
        peaks.append(ccp(f1.hv, f2.hv).data.max())
    peaks = np.array(peaks)
    assert (peaks.max() - peaks.min()) / peaks.mean() <= 1e-9
    # the apex sample sits within a fraction of a sample of the pulse peak
    assert 0.45 < peaks[0] <= 0.5


def test_detect_single_spike():
    x = np.zeros((10, 12))
    x[4, 7] = 2.0
    d = detect(make_scan(x, "CCP"))
    assert d.detected and (d.trace_index, d.sample_index) == (7, 4)


def test_detect_all_zero():
    d = detect(make_scan(np.zeros((5, 5)), "CCP"))
    assert not d.detected and d.trace_index is None and d.sample_index is None


def test_detect_tie_break():
    x = np.zeros((6, 6))
    x[5, 2] = x[1, 3] = x[0, 4] = 1.0
    d = detect(make_scan(x, "CCP"))
    assert (d.trace_index, d.sample_index) == (2, 5)
    x[1, 2] = 1.0
    assert detect(make_scan(x, "CCP")).sample_index == 1


def test_detect_flat_noise_is_not_detection():
    x = np.ones((10, 20))
    assert not detect(make_scan(x, "CCP")).detected


@pytest.mark.parametrize("theta", range(0, 180, 10))
def test_detect_sweep_finds_apex(theta):
    target = TargetModel(theta=float(theta))
    f1, f2 = synthesize_pair(target)
    d = detect(ccp(mean_subtract(f1.hv), mean_subtract(f2.hv)))
    _, j = apex_indices(target, f1.grid, WaveletSpec())
    assert d.detected and abs(d.trace_index - j) <= 1


def test_detect_scale_invariant():
    f1, f2 = synthesize_pair(TargetModel(theta=33.0))
    d1 = detect(ccp(f1.hv, f2.hv))
    d2 = detect(ccp(f1.hv.with_data(7 * f1.hv.data), f2.hv.with_data(7 * f2.hv.data)))
    assert (d1.trace_index, d1.sample_index) == (d2.trace_index, d2.sample_index)


def test_shift_traces():
    b = make_scan(np.arange(8.0).reshape(2, 4))
    assert shift_traces(b, 1).data.tolist() == [[0, 0, 1, 2], [0, 4, 5, 6]]
    assert shift_traces(b, -2).data.tolist() == [[2, 3, 0, 0], [6, 7, 0, 0]]
    assert shift_traces(b, 0) is b
