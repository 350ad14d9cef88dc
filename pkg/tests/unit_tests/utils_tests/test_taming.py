import numpy as np
import pytest

import nsdde_milstein._utils.taming as taming
from nsdde_milstein._utils.exceptions import BadExponent, BadStep, NonFiniteInput


def test_tame_scalar_drift():
    tamed = taming.tame_drift(2.0, 0.25, 0.5)
    assert tamed.value.tolist() == [1.0]
    assert tamed.raw_norm == 2.0


def test_tame_vector_drift():
    tamed = taming.tame_drift([3.0, 4.0], 0.04, 0.5)
    np.testing.assert_allclose(tamed.value, [1.5, 2.0])
    assert tamed.raw_norm == 5.0


def _random_triples(count, seed=2024, dim=3):
    """Drifts with log-uniform norms in [1e-3, 1e6], steps in [1e-6, 1) and
    exponents in (0, 1/2].
    """
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((count, dim))
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    sizes = 10.0 ** rng.uniform(-3, 6, (count, 1))
    deltas = rng.uniform(1e-6, 1 - 1e-9, (count, 1))
    alphas = rng.uniform(1e-3, 0.5, (count, 1))
    return directions * sizes, deltas, alphas


def test_tamed_drift_is_bounded():
    drift, deltas, alphas = _random_triples(100000)
    tamed = taming.apply_taming(drift, deltas, alphas)
    tamed_norm = np.linalg.norm(tamed, axis=-1)
    assert np.all(tamed_norm <= deltas[:, 0] ** -alphas[:, 0])
    assert np.all(tamed_norm <= np.linalg.norm(drift, axis=-1))
    # one step of tamed drift moves at most dt**(1 - alpha)
    assert np.all(tamed_norm * deltas[:, 0] <= deltas[:, 0] ** (1 - alphas[:, 0]))


def test_huge_drift_is_tamed_to_the_cap():
    tamed = taming.tame_drift(1e150, 0.25, 0.5)
    assert tamed.value[0] == pytest.approx(2.0, rel=1e-12)


def test_taming_keeps_direction():
    drift, deltas, alphas = _random_triples(10000, seed=7)
    factor = taming.taming_factor(
        np.linalg.norm(drift, axis=-1, keepdims=True), deltas, alphas
    )
    assert np.all((factor > 0) & (factor <= 1))
    tamed = taming.apply_taming(drift, deltas, alphas)
    np.testing.assert_allclose(
        tamed / drift, np.broadcast_to(factor, drift.shape), rtol=1e-15
    )


def test_taming_gap_bound():
    drift, deltas, alphas = _random_triples(2000, seed=11)
    for b_val, (delta,), (alpha,) in zip(drift, deltas, alphas):
        gap = taming.taming_gap(b_val, delta, alpha)
        raw_norm = np.linalg.norm(b_val, axis=-1)
        assert gap <= delta ** alpha * raw_norm * raw_norm
        tamed = taming.tame_drift(b_val, delta, alpha)
        assert np.linalg.norm(tamed.value, axis=-1) <= min(delta ** -alpha, raw_norm)


def test_zero_drift():
    tamed = taming.tame_drift(np.zeros(3), 0.1, 0.5)
    assert np.all(tamed.value == 0)
    assert taming.taming_gap(np.zeros(3), 0.1, 0.5) == 0


def test_batched_drift():
    drift = np.arange(10, dtype=float).reshape(5, 2)
    tamed = taming.tame_drift(drift, 0.25, 0.5)
    assert tamed.value.shape == (5, 2)
    assert tamed.raw_norm.shape == (5,)
    np.testing.assert_allclose(
        tamed.value[3], drift[3] / (1 + 0.5 * np.linalg.norm(drift[3]))
    )


def test_taming_gap():
    assert taming.taming_gap([3.0, 4.0], 0.04, 0.5) == pytest.approx(2.5)
    tamed = taming.tame_drift([3.0, 4.0], 0.04, 0.5)
    assert np.linalg.norm(np.array([3.0, 4.0]) - tamed.value) == pytest.approx(2.5)


def test_taming_vanishes_with_step():
    gaps = [taming.taming_gap(10.0, 2.0 ** -e, 0.5) for e in range(2, 30)]
    assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.1


@pytest.mark.parametrize(
    "delta,alpha,error",
    [(1.0, 0.5, BadStep), (0.0, 0.5, BadStep), (0.1, 0.6, BadExponent)],
)
def test_taming_argument_errors(delta, alpha, error):
    with pytest.raises(error):
        taming.tame_drift(1.0, delta, alpha)
    with pytest.raises(error):
        taming.taming_gap(1.0, delta, alpha)


def test_non_finite_drift():
    with pytest.raises(NonFiniteInput):
        taming.tame_drift([1.0, np.nan], 0.1, 0.5)
    with pytest.raises(NonFiniteInput):
        taming.taming_gap(np.inf, 0.1, 0.5)
