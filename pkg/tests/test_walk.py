import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import coin_matrix, dense_walk, path_sum, path_sum_probabilities
from u2walk.analysis import distribution, mean_position
from u2walk.coins import CoinParams, InvalidParameterError, hadamard_params, make_coin, su2_part
from u2walk.walk import (
    InitialSpec,
    InvalidCoinError,
    WalkState,
    evolve,
    evolve_many,
    initial_state,
    step,
)

S2 = 1 / math.sqrt(2)


def random_spec(rng):
    z = rng.normal(size=4)
    v = np.array([complex(z[0], z[1]), complex(z[2], z[3])])
    v /= np.linalg.norm(v)
    return InitialSpec.custom(v[0], v[1])


def assert_invariants(state: WalkState):
    t = state.t
    assert state.offset == -t
    assert len(state.amplitudes) == 2 * t + 1
    x = state.positions
    odd = (x + t) % 2 == 1
    assert np.all(state.amplitudes[odd] == 0)
    assert abs(state.norm() - 1) <= 1e-12 * max(t, 1)


class TestInitialState:
    def test_pure_l(self):
        s = initial_state(InitialSpec.pure_l())
        assert s.t == 0 and s.amplitude(0) == (1, 0)
        assert s.amplitude(1) == (0, 0)

    def test_symmetric(self):
        s = initial_state(InitialSpec.symmetric())
        assert s.amplitude(0) == pytest.approx((S2, 1j * S2))

    def test_custom(self):
        s = initial_state(InitialSpec.custom(0.6, 0.8j))
        assert s.amplitude(0) == (0.6, 0.8j)

    def test_variants_fix_coefficients(self):
        assert (InitialSpec.pure_r().m, InitialSpec.pure_r().n) == (0, 1)

    @pytest.mark.parametrize("m, n", [(1, 1), (0.5, 0.5), (0, 0)])
    def test_non_normalized_rejected(self, m, n):
        with pytest.raises(InvalidParameterError):
            InitialSpec.custom(m, n)

    def test_from_name(self):
        assert InitialSpec.from_name("symmetric") == InitialSpec.symmetric()
        assert InitialSpec.from_name("R") == InitialSpec.pure_r()
        with pytest.raises(InvalidParameterError):
            InitialSpec.from_name("custom")
        with pytest.raises(InvalidParameterError):
            InitialSpec.from_name("up")


class TestStep:
    def test_hadamard_single_step(self):
        s = step(initial_state(InitialSpec.pure_l()), make_coin(hadamard_params()))
        a_l, _ = s.amplitude(-1)
        _, a_r = s.amplitude(1)
        assert a_l == pytest.approx(S2, abs=1e-15)
        assert a_r == pytest.approx(S2, abs=1e-15)
        assert s.amplitude(0) == (0, 0)

    def test_su2_single_step(self):
        a, b, g = 0.4, 1.1, -0.9
        s = step(initial_state(InitialSpec.pure_l()), su2_part(CoinParams(a, b, g)))
        assert s.amplitude(-1)[0] == pytest.approx(cmath.exp(1j * a) * math.cos(b), abs=1e-15)
        assert s.amplitude(1)[1] == pytest.approx(cmath.exp(1j * g) * math.sin(b), abs=1e-15)

    def test_two_hadamard_steps_match_path_sum(self):
        # path-sum oracle: {-2: 1/4, 0: 1/2, 2: 1/4}
        h = make_coin(hadamard_params())
        s = step(step(initial_state(InitialSpec.pure_l()), h), h)
        d = distribution(s)
        expected = path_sum_probabilities(coin_matrix(math.pi / 2, math.pi / 4, math.pi / 2, -math.pi / 2), 1, 0, 2)
        assert expected == pytest.approx({-2: 0.25, 0: 0.5, 2: 0.25}, abs=1e-15)
        for x, p in expected.items():
            assert d.at(x) == pytest.approx(p, abs=1e-15)
        assert d.at(-1) == 0 and d.at(1) == 0

    def test_non_unitary_coin_rejected(self):
        with pytest.raises(InvalidCoinError):
            step(initial_state(InitialSpec.pure_l()), np.array([[1.1, 0], [0, 1]]))

    def test_state_immutable(self):
        s = initial_state(InitialSpec.pure_l())
        with pytest.raises(ValueError):
            s.amplitudes[0, 0] = 2


class TestEvolve:
    def test_diagonal_coin_moves_left_only(self):
        s = evolve(InitialSpec.pure_l(), CoinParams(0.8, 0.0, -0.3, 1.0), 5)
        assert abs(s.amplitude(-5)[0]) == pytest.approx(1.0, abs=1e-15)
        mask = np.ones(len(s.amplitudes), bool)
        mask[0] = False
        assert np.all(s.amplitudes[mask] == 0) and s.amplitudes[0, 1] == 0

    def test_swap_coin_returns_to_origin(self):
        # two-step cycle enumeration: L -> (x=-1) -> chirality R -> back to 0
        d = distribution(evolve(InitialSpec.pure_l(), CoinParams(0, math.pi / 2, 0, 0), 2))
        assert d.at(0) == pytest.approx(1.0, abs=1e-15)
        oracle = path_sum_probabilities(coin_matrix(0, math.pi / 2, 0), 1, 0, 2)
        assert oracle[0] == pytest.approx(1.0, abs=1e-15)

    def test_symmetric_hadamard_has_zero_mean(self):
        d = distribution(evolve(InitialSpec.symmetric(), hadamard_params(), 100))
        assert abs(mean_position(d)) <= 1e-10

    def test_negative_t_rejected(self):
        with pytest.raises(InvalidParameterError):
            evolve(InitialSpec.pure_l(), hadamard_params(), -1)

    @pytest.mark.parametrize("t", [0, 1, 3, 6])
    def test_matches_path_sum_amplitudes(self, t):
        rng = np.random.default_rng(t)
        a, b, g, th = rng.uniform(-3, 3, 4)
        spec = random_spec(rng)
        state = evolve(spec, CoinParams(a, b, g, th), t)
        oracle = path_sum(coin_matrix(a, b, g, th), spec.m, spec.n, t)
        for x in range(-t, t + 1):
            for c in (0, 1):
                assert state.amplitude(x)[c] == pytest.approx(oracle.get((x, c), 0), abs=1e-13)

    @pytest.mark.parametrize("t", [10, 40])
    def test_matches_dense_unitary(self, t):
        rng = np.random.default_rng(100 + t)
        a, b, g, th = rng.uniform(-3, 3, 4)
        spec = random_spec(rng)
        state = evolve(spec, CoinParams(a, b, g, th), t)
        np.testing.assert_allclose(state.amplitudes, dense_walk(coin_matrix(a, b, g, th), spec.m, spec.n, t), atol=1e-12)

    def test_evolve_many_matches_evolve(self):
        rng = np.random.default_rng(3)
        params = [CoinParams(*rng.uniform(-3, 3, 4)) for _ in range(6)]
        batch = evolve_many(InitialSpec.symmetric(), params, 17)
        for p, amps in zip(params, batch):
            np.testing.assert_array_equal(amps, evolve(InitialSpec.symmetric(), p, 17).amplitudes)
        assert evolve_many(InitialSpec.symmetric(), [], 3).shape == (0, 7, 2)


def test_normalization_support_parity_random_trials():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        params = CoinParams(*rng.uniform(-math.pi, math.pi, 4))
        t = int(rng.integers(0, 51))
        state = evolve(random_spec(rng), params, t)
        assert_invariants(state)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(-math.pi, math.pi),
    st.floats(-math.pi, math.pi),
    st.floats(-math.pi, math.pi),
    st.integers(0, 30),
)
def test_invariants_after_every_step(a, b, g, t):
    coin = make_coin(CoinParams(a, b, g))
    state = initial_state(InitialSpec.symmetric())
    for _ in range(t):
        state = step(state, coin)
        assert_invariants(state)


@pytest.mark.parametrize("spec", [InitialSpec.pure_l(), InitialSpec.symmetric(), InitialSpec.custom(0.6, 0.8j)])
def test_global_phase_invariance(spec):
    a, b, g = 0.9, 0.7, -1.6
    dists = [distribution(evolve(spec, CoinParams(a, b, g, th), 25)) for th in (0, 0.7, math.pi / 2, 2.1)]
    for d in dists[1:]:
        np.testing.assert_allclose(d.p_L, dists[0].p_L, atol=1e-12, rtol=0)
        np.testing.assert_allclose(d.p_R, dists[0].p_R, atol=1e-12, rtol=0)


@settings(max_examples=40, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.integers(0, 40))
def test_mirror_property(a, b, g, t):
    p = CoinParams(a, b, g)
    dl = distribution(evolve(InitialSpec.pure_l(), p, t))
    dr = distribution(evolve(InitialSpec.pure_r(), p, t))
    np.testing.assert_allclose(dl.p_R, dr.p_L[::-1], atol=1e-12, rtol=0)
    np.testing.assert_allclose(dl.p_L, dr.p_R[::-1], atol=1e-12, rtol=0)
    assert mean_position(dl) == pytest.approx(-mean_position(dr), abs=1e-10)
