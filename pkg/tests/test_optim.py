import numpy as np
import pytest

from molfuse import numkit as nk
from molfuse.errors import NumericError, ShapeError
from molfuse.numkit import AdamState, PlateauScheduler, adam_step


def make_param(values):
    return nk.tensor(np.asarray(values, dtype=np.float64), requires_grad=True)


def test_zero_grad_zero_decay_is_identity():
    p = make_param([1.0, -2.0, 3.0])
    before = p.data.copy()
    adam_step({"w": p}, {"w": np.zeros(3)}, AdamState(lr=3e-4))
    assert np.array_equal(p.data, before)


def test_first_step_magnitude_close_to_lr():
    # bias correction makes the first update m_hat/sqrt(v_hat) = sign(g),
    # so |delta| = lr * |g| / (|g| + eps') which is lr to ~1e-5 relative
    p = make_param([0.0])
    adam_step({"w": p}, {"w": np.array([10.0])}, AdamState(lr=1e-3))
    assert abs(p.data[0] + 1e-3) < 1e-3 * 1e-4


def test_weight_decay_pulls_toward_zero():
    p = make_param([5.0])
    state = AdamState(lr=1e-2, weight_decay=1e-1)
    for _ in range(200):
        adam_step({"w": p}, {"w": np.zeros(1)}, state)
    assert abs(p.data[0]) < 5.0
    assert p.data[0] > 0.0 or abs(p.data[0]) < 1e-6


def test_lr_zero_is_identity():
    p = make_param([[1.0, 2.0]])
    before = p.data.copy()
    adam_step({"w": p}, {"w": np.array([[0.3, -0.7]])}, AdamState(lr=0.0))
    assert np.array_equal(p.data, before)


def test_nan_gradient_raises_with_name():
    p = make_param([1.0])
    with pytest.raises(NumericError, match="head.bias"):
        adam_step({"head.bias": p}, {"head.bias": np.array([np.nan])}, AdamState())


def test_shape_mismatch_raises():
    p = make_param([1.0, 2.0])
    with pytest.raises(ShapeError):
        adam_step({"w": p}, {"w": np.zeros(3)}, AdamState())


def test_adam_descends_quadratic():
    p = make_param([4.0])
    state = AdamState(lr=1e-1)
    for _ in range(300):
        adam_step({"w": p}, {"w": 2.0 * p.data}, state)
    assert abs(p.data[0]) < 1e-2


def test_adam_bitwise_deterministic():
    def run():
        p = make_param([[0.5, -0.5], [1.5, 2.5]])
        state = AdamState(lr=3e-4, weight_decay=1e-3)
        rng = np.random.default_rng(11)
        for _ in range(50):
            adam_step({"w": p}, {"w": rng.normal(size=(2, 2))}, state)
        return p.data.copy()

    assert np.array_equal(run(), run())


def test_scheduler_halving_after_patience():
    sched = PlateauScheduler(lr=3e-4, factor=0.5, patience=5, mode="min")
    lr = sched.lr
    for _ in range(6):
        lr = sched.step(1.0)
    assert lr == pytest.approx(1.5e-4)


def test_scheduler_no_halving_while_improving():
    sched = PlateauScheduler(lr=3e-4, factor=0.5, patience=5, mode="min")
    metric = 10.0
    for _ in range(30):
        metric -= 0.1
        lr = sched.step(metric)
    assert lr == pytest.approx(3e-4)


def test_scheduler_repeated_halving_on_flat_metric():
    sched = PlateauScheduler(lr=3e-4, factor=0.5, patience=5, mode="min")
    for _ in range(12):
        lr = sched.step(2.0)
    assert lr == pytest.approx(7.5e-5)


def test_scheduler_max_mode_tracks_improvement():
    sched = PlateauScheduler(lr=1e-3, factor=0.5, patience=2, mode="max")
    sched.step(0.5)
    sched.step(0.6)  # improvement, counter resets
    sched.step(0.6)  # flat
    lr = sched.step(0.6)  # flat, hits patience
    assert lr == pytest.approx(5e-4)


def test_scheduler_strict_improvement_required():
    sched = PlateauScheduler(lr=1e-3, factor=0.5, patience=1, mode="min")
    sched.step(1.0)
    lr = sched.step(1.0)  # equal is not an improvement
    assert lr == pytest.approx(5e-4)
