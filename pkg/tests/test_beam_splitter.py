import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from hpnc.beam_splitter import (BSParams, SearchConfig, TwoModeState, apply_bs,
                                bs_route_mandel, embed_with_vacuum, entanglement_potential,
                                hz_two_mode_violation, schmidt_analysis, verify_mode_transform)
from hpnc.criteria import mandel_violation
from hpnc.errors import BlockOverflow, DegenerateBS, DimensionError, InvalidSpec
from hpnc.fock import StateSpec, coherent_amplitudes, random_pure_state, state_from_spec

BALANCED = BSParams.balanced()


def build(kind, dim, **params):
    return state_from_spec(StateSpec(kind, params), dim)


def product(a, b):
    return TwoModeState(np.outer(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))


def random_params(rng):
    return BSParams.from_transmission(rng.uniform(0.05, 0.95), rng.uniform(0, 2 * math.pi))


def test_params_validation():
    with pytest.raises(InvalidSpec):
        BSParams(0.5, 0.5)
    p = BSParams.from_t(0.6, 0.3)
    assert p.r == pytest.approx(0.8)
    m = p.mode_matrix()
    np.testing.assert_allclose(m @ m.conj().T, np.eye(2), atol=1e-15)


def test_embed_with_vacuum():
    out = embed_with_vacuum(build("fock", 10, n=1), 10)
    assert out.amplitudes[1, 0] == 1 and np.count_nonzero(out.amplitudes) == 1
    coh = build("coherent", 30, alpha=1)
    out = embed_with_vacuum(coh, 12)
    np.testing.assert_array_equal(out.amplitudes[:, 0], coh.amplitudes)
    assert np.count_nonzero(out.amplitudes[:, 1:]) == 0
    cat = embed_with_vacuum(build("cat", 40, components=[(1, 2), (1, -2)]))
    assert np.sum(np.abs(cat.amplitudes) ** 2) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("phi", [0.0, 1.0, 4.0])
def test_vacuum_invariant(phi):
    vac = embed_with_vacuum(build("fock", 4, n=0))
    out = apply_bs(vac, BSParams.from_t(0.3, phi))
    assert abs(out.amplitudes[0, 0]) == pytest.approx(1, abs=1e-14)


def test_single_photon_split_matches_adjoint_oracle():
    out = apply_bs(embed_with_vacuum(build("fock", 6, n=1)), BALANCED)
    u = oracles.dense_bs_unitary(BALANCED.t, BALANCED.r, 0.0, 6)
    # B a1^dag B^dag |0,0> = B |1,0>
    ket = np.zeros(36, dtype=complex)
    ket[1 * 6 + 0] = 1
    ref = (u @ ket).reshape(6, 6)
    np.testing.assert_allclose(out.amplitudes, ref, atol=1e-12)
    assert abs(out.amplitudes[1, 0]) == pytest.approx(1 / math.sqrt(2))
    assert abs(out.amplitudes[0, 1]) == pytest.approx(1 / math.sqrt(2))
    # t e^{i phi} |1,0> - r |0,1>
    assert out.amplitudes[0, 1] == pytest.approx(-1 / math.sqrt(2))


def test_apply_matches_dense_exponential(rng):
    dim = 7
    for _ in range(5):
        p = random_params(rng)
        amps = np.zeros((dim, dim), dtype=complex)
        for n1 in range(dim):
            for n2 in range(dim - n1):
                amps[n1, n2] = rng.normal() + 1j * rng.normal()
        state = TwoModeState(amps / np.linalg.norm(amps))
        ref = (oracles.dense_bs_unitary(p.t, p.r, p.phi, dim) @ state.amplitudes.ravel())
        np.testing.assert_allclose(apply_bs(state, p).amplitudes.ravel(), ref, atol=1e-10)


def test_block_overflow():
    amps = np.zeros((4, 4))
    amps[3, 1] = 1
    with pytest.raises(BlockOverflow):
        apply_bs(TwoModeState(amps), BALANCED)


def test_mode_transform_examples(rng):
    assert verify_mode_transform(BALANCED, 12) < 1e-10
    assert verify_mode_transform(BSParams(1.0, 0.0, 0.7), 9) < 1e-13
    for _ in range(3):
        assert verify_mode_transform(random_params(rng), 20) < 1e-10
    with pytest.raises(DimensionError):
        verify_mode_transform(BALANCED, 1)


def test_schmidt_examples():
    coh = schmidt_analysis(apply_bs(embed_with_vacuum(build("coherent", 40, alpha=1)), BALANCED))
    assert coh.rank == 1 and coh.entropy_bits == pytest.approx(0, abs=1e-10)
    one = schmidt_analysis(apply_bs(embed_with_vacuum(build("fock", 8, n=1)), BALANCED))
    np.testing.assert_allclose(one.singular_values[:2], [1 / math.sqrt(2)] * 2, atol=1e-12)
    assert one.rank == 2 and one.entropy_bits == pytest.approx(1, abs=1e-12)
    cat = build("cat", 40, components=[(1, 2), (1, -2)])
    res = schmidt_analysis(apply_bs(embed_with_vacuum(cat), BALANCED), 1e-6)
    assert res.rank == 2
    assert np.sum(res.singular_values**2) == pytest.approx(1, abs=1e-10)


def test_hz_examples():
    a, b = 1.2 - 0.3j, 0.4 + 0.9j
    prod = product(coherent_amplitudes(a, 40), coherent_amplitudes(b, 40))
    assert hz_two_mode_violation(prod, 1, 1) == pytest.approx(0, abs=1e-10)
    out = apply_bs(embed_with_vacuum(build("fock", 8, n=1)), BALANCED)
    assert hz_two_mode_violation(out, 1, 1) == pytest.approx(0.25, abs=1e-12)
    coh_out = apply_bs(embed_with_vacuum(build("coherent", 40, alpha=0.8j)), BSParams.from_t(0.3))
    assert hz_two_mode_violation(coh_out, 1, 1) == pytest.approx(0, abs=1e-10)
    with pytest.raises(DimensionError):
        hz_two_mode_violation(out, 8, 1)


def test_output_moment_identities(rng):
    # <a1 a2^dag> = -r t e^{i phi} <n>,  <n1 n2> = t^2 r^2 <a^dag^2 a^2>
    s = random_pure_state(rng, 10)
    p = random_params(rng)
    out = apply_bs(embed_with_vacuum(s), p).amplitudes
    dim = 10
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    n_op = a.T @ a
    cross = np.vdot(out, a @ out @ a)   # a1 acts on rows; a2^dag on columns
    n1n2 = np.vdot(out, n_op @ out @ n_op.T).real
    psi = s.amplitudes
    nbar = np.vdot(psi, n_op @ psi).real
    g2 = np.vdot(psi, a.T @ a.T @ a @ a @ psi).real
    assert cross == pytest.approx(-p.r * p.t * np.exp(1j * p.phi) * nbar, abs=1e-10)
    assert n1n2 == pytest.approx(p.t**2 * p.r**2 * g2, abs=1e-10)


def test_bs_route_examples():
    assert bs_route_mandel(build("fock", 8, n=1), BALANCED) == pytest.approx(1, abs=1e-9)
    assert bs_route_mandel(build("coherent", 40, alpha=1), BSParams.from_t(0.4, 2)) == \
        pytest.approx(0, abs=1e-9)
    assert bs_route_mandel(build("thermal", 60, nbar=1), BALANCED) == pytest.approx(-1, abs=1e-9)
    with pytest.raises(DegenerateBS):
        bs_route_mandel(build("fock", 8, n=1), BSParams(1.0, 0.0))


def test_entanglement_potential_simple_cases():
    value, _ = entanglement_potential(build("fock", 4, n=0), SearchConfig(t2_points=5, phi_points=2))
    assert value == pytest.approx(0, abs=1e-12)
    value, best = entanglement_potential(build("fock", 6, n=1))
    assert value == pytest.approx(1, abs=1e-9)
    assert best.t**2 == pytest.approx(0.5, abs=1e-4)
    fixed = SearchConfig(fixed=BSParams.from_transmission(0.2))
    value, best = entanglement_potential(build("fock", 6, n=1), fixed)
    assert best == fixed.fixed
    assert value == pytest.approx(-(0.2 * math.log2(0.2) + 0.8 * math.log2(0.8)), abs=1e-12)


@pytest.mark.slow
def test_entanglement_potential_gaussian_oracle():
    s = build("squeezed_vacuum", 60, r=0.5)
    value, _ = entanglement_potential(s)
    ref, _ = oracles.gaussian_entanglement_potential(0.5)
    assert ref == pytest.approx(0.34827744746468, abs=1e-12)
    assert value == pytest.approx(ref, abs=1e-4)


def _round_trip_state(seed, dim=10):
    return embed_with_vacuum(random_pure_state(np.random.default_rng(seed), dim))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t2=st.floats(0.0, 1.0), phi=st.floats(-7, 7))
def test_unitarity_and_number_conservation(seed, t2, phi):
    state = _round_trip_state(seed)
    p = BSParams.from_transmission(t2, phi)
    out = apply_bs(state, p)
    assert np.sum(np.abs(out.amplitudes) ** 2) == pytest.approx(1, abs=1e-12)
    np.testing.assert_allclose(out.total_number_distribution(),
                               state.total_number_distribution(), atol=1e-12)
    back = apply_bs(out, p.inverse())
    np.testing.assert_allclose(back.amplitudes, state.amplitudes, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_product_states_rank_one_and_no_hz(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=6) + 1j * rng.normal(size=6)
    b = rng.normal(size=5) + 1j * rng.normal(size=5)
    state = product(a, b)
    assert schmidt_analysis(state).rank == 1
    for m in (1, 2):
        for n in (1, 2):
            assert hz_two_mode_violation(state, m, n) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t2=st.floats(0.02, 0.98), phi=st.floats(0, 6.3))
def test_bs_route_equals_mandel(seed, t2, phi):
    s = random_pure_state(np.random.default_rng(seed), 12)
    p = BSParams.from_transmission(t2, phi)
    assert abs(bs_route_mandel(s, p) - mandel_violation(s)) < 1e-9


@pytest.mark.parametrize("spec", [
    ("fock", 6, {"n": 0}), ("coherent", 40, {"alpha": 1.5}),
    ("fock", 6, {"n": 1}), ("squeezed_vacuum", 40, {"r": 0.3}),
    ("cat", 40, {"components": [(1, 2), (1, -2)]}),
])
def test_potential_zero_iff_balanced_rank_one(spec):
    kind, dim, params = spec
    s = build(kind, dim, **params)
    rank = schmidt_analysis(apply_bs(embed_with_vacuum(s), BALANCED)).rank
    value, _ = entanglement_potential(s, SearchConfig(t2_points=5, phi_points=2, tol=1e-2))
    assert (value < 1e-9) == (rank == 1)
