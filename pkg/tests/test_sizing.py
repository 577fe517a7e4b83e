import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.services.config import config_from_dict
from src.services.sizing import (
    CrossoverModel,
    SizingError,
    crossover_size,
    data_qubits,
    data_register_size,
    expression_env,
    fem_edges,
    hs_time_constant,
    qae_M,
    register_total,
    resolve_params,
    trotter_slices,
)


def test_fem_edges():
    assert fem_edges(4, 4) == 24
    assert fem_edges(12885, 12885) == 332_020_680
    with pytest.raises(SizingError):
        fem_edges(0, 3)


@pytest.mark.parametrize(
    "N, n2",
    [(1, 1), (2, 2), (3, 3), (4, 3), (5, 4), (24, 6), (332_020_680, 30)],
)
def test_data_register_size(N, n2):
    assert data_register_size(N) == n2
    assert 2**n2 >= 2 * N


def test_data_register_size_rejects_empty_problem():
    with pytest.raises(SizingError):
        data_register_size(0)


def test_qae_register_for_published_accuracy():
    q = qae_M(0.01, 0.01)
    assert q.n0 == 14
    assert q.M == 16384
    assert q.m_bound == 32045


def test_qae_power_of_two_boundary():
    # 1/eps^2 == 2^4 exactly
    assert qae_M(0.25, 0.1).n0 == 4


@pytest.mark.parametrize("eps, p_err", [(0.0, 0.1), (1.0, 0.1), (0.1, 0.0), (0.1, 1.0)])
def test_qae_rejects_out_of_range(eps, p_err):
    with pytest.raises(SizingError):
        qae_M(eps, p_err)


def test_trotter_slices_formula():
    r = trotter_slices(2, 9, 7e6, 0.01)
    assert r == pytest.approx(4.72e11, rel=2e-3)
    split = 0.01 / (2**15 - 1)
    assert trotter_slices(2, 9, 7e6, split) == pytest.approx(6.356e12, rel=2e-3)
    assert trotter_slices(2, 9, 3.5e6, split) == pytest.approx(2.67e12, rel=5e-3)


def test_trotter_slices_rejects_non_positive_inputs():
    with pytest.raises(SizingError):
        trotter_slices(0, 9, 7e6, 0.01)
    with pytest.raises(SizingError):
        trotter_slices(2, 9, 7e6, 0.0)


def test_hs_time_constant():
    assert hs_time_constant(1e4, 0.01) == pytest.approx(7e6)
    with pytest.raises(SizingError):
        hs_time_constant(0, 0.01)


def test_crossover_hhl_published_point():
    n = crossover_size(1e4, 10, 0.01, CrossoverModel.HHL)
    assert n == pytest.approx(3.79e7, rel=1e-2)
    # fixed point of the defining equation
    lhs = n * 10 * 1e4 * math.log10(1 / 0.01)
    rhs = 1e8 * 100 * math.log10(n) / 0.01
    assert lhs == pytest.approx(rhs, rel=1e-5)


def test_crossover_cjs_is_far_larger():
    hhl = crossover_size(1e4, 10, 0.01, "HHL")
    cjs = crossover_size(1e4, 10, 0.01, "CJS")
    assert cjs > 100 * hhl
    assert 1e10 < cjs < 1e12


def test_crossover_converges_for_trivial_problem():
    assert crossover_size(1, 1, 0.5) == pytest.approx(4.0, rel=1e-4)


def test_crossover_rejects_bad_inputs():
    with pytest.raises(SizingError):
        crossover_size(0, 10, 0.01)
    with pytest.raises(SizingError):
        crossover_size(1e4, 10, 1.5)
    with pytest.raises(ValueError):
        crossover_size(1e4, 10, 0.01, "BICG")


def test_resolve_params_defaults(default_params):
    p = default_params
    assert p.N == 332_020_680
    assert (p.n0, p.n1, p.n2, p.n4) == (14, 24, 30, 65)
    assert p.r == 2_500_000_000_000
    assert p.r_from_override
    assert p.t0 == pytest.approx(7e6)
    assert p.normA_t == pytest.approx(3.5e6)
    assert register_total(p) == 287
    assert data_qubits(p) == 60


def test_resolve_params_follows_formula_without_override():
    cfg = config_from_dict({"trotter": {"r_override": None}})
    p = resolve_params(cfg)
    assert not p.r_from_override
    assert p.r == pytest.approx(2.67e12, rel=5e-3)


def test_resolve_params_without_error_split():
    cfg = config_from_dict(
        {"trotter": {"r_override": None, "split_error": False, "time_fraction": 1.0}}
    )
    assert resolve_params(cfg).r == pytest.approx(4.72e11, rel=2e-3)


def test_explicit_N_wins_over_grid(small_config):
    p = resolve_params(small_config)
    assert p.N == 24
    assert p.n2 == 6
    assert register_total(p) == 14 + 48 + 18 + 130 + 5


def test_expression_env(default_params):
    env = expression_env(default_params)
    assert env == {
        "n0": 14,
        "n1": 24,
        "n2": 30,
        "n4": 65,
        "Nb": 9,
        "k": 2,
        "r": 2_500_000_000_000,
        "mix_true": 3,
    }


@given(st.integers(1, 10**7), st.integers(1, 10**7))
def test_fem_edges_is_symmetric(nx, ny):
    assert fem_edges(nx, ny) == fem_edges(ny, nx)


@given(st.integers(1, 2**40))
def test_data_register_size_steps_only_past_powers_of_two(N):
    step = data_register_size(N + 1) - data_register_size(N)
    assert step == (1 if N & (N - 1) == 0 else 0)


@pytest.mark.parametrize("j", range(0, 40))
def test_data_register_size_at_powers_of_two(j):
    N = 2**j
    assert data_register_size(N) == j + 1
    assert data_register_size(N + 1) == j + 2


_k = st.integers(1, 4)
_nb = st.integers(1, 50)
_norm = st.floats(1.0, 1e8)
_eps = st.floats(1e-6, 0.5)


@given(_k, _nb, _norm, _eps)
def test_trotter_slices_grow_with_bands_and_evolution(k, Nb, normA_t, eps):
    r = trotter_slices(k, Nb, normA_t, eps)
    assert trotter_slices(k, Nb + 1, normA_t, eps) >= r
    assert trotter_slices(k, Nb, normA_t * 1.5, eps) >= r


@given(_k, _nb, _norm, _eps)
def test_trotter_slices_shrink_as_epsilon_grows(k, Nb, normA_t, eps):
    assert trotter_slices(k, Nb, normA_t, eps / 2) >= trotter_slices(k, Nb, normA_t, eps)


def test_higher_suzuki_order_needs_fewer_slices_for_long_evolutions():
    r = [trotter_slices(k, 9, 3.5e6, 0.01) for k in (1, 2)]
    assert r[1] < r[0]
