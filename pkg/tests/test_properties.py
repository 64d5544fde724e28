import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from aps_sim.metrics import kld, kld_vs_uniform
from aps_sim.oracles import (
    Graph,
    SubsetSumInstance,
    linear_phase_map,
    maxcut_cost,
    subset_sum_cost,
    triangular_phase_map,
)
from aps_sim.state import (
    PhaseTable,
    RegisterLayout,
    StateVector,
    apply_controlled_phase_oracle,
    apply_global_diffusion,
    apply_local_diffusion,
    apply_phase_oracle,
    marginal_work_distribution,
    sample,
)

layouts = st.tuples(st.integers(1, 5), st.integers(2, 5)).map(lambda t: RegisterLayout(*t))
seeds = st.integers(0, 2**32 - 1)


def random_state(layout, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=layout.dim) + 1j * rng.normal(size=layout.dim)
    return StateVector(layout, v / np.linalg.norm(v)), rng


@given(layouts, seeds)
def test_oracles_are_diagonal_and_norm_preserving(layout, seed):
    s, rng = random_state(layout, seed)
    table = PhaseTable(rng.uniform(-10, 10, layout.n_states))
    for op in (apply_phase_oracle, apply_controlled_phase_oracle):
        out = op(s, table)
        assert np.max(np.abs(np.abs(out.amps) - np.abs(s.amps))) < 1e-12
        assert abs(out.norm() - 1) < 1e-10


@given(layouts, seeds)
def test_diffusers_are_involutions(layout, seed):
    s, _ = random_state(layout, seed)
    for op in (apply_local_diffusion, apply_global_diffusion):
        assert np.max(np.abs(op(op(s)).amps - s.amps)) < 1e-11


@given(layouts, st.data())
def test_local_diffusion_never_mixes_work_blocks(layout, data):
    x = data.draw(st.integers(0, layout.n_states - 1))
    a = data.draw(st.integers(0, layout.block - 1))
    amps = np.zeros(layout.dim, dtype=complex)
    amps[layout.index(x, a)] = 1
    out = apply_local_diffusion(StateVector(layout, amps)).blocks()
    assert np.count_nonzero(np.delete(out, x, axis=0)) == 0


@given(layouts, seeds)
def test_marginal_is_normalised(layout, seed):
    s, _ = random_state(layout, seed)
    assert abs(marginal_work_distribution(s).sum() - 1) < 1e-10


@given(st.integers(1, 6), st.integers(1, 5000), seeds)
def test_seeded_sampling_is_deterministic(n, shots, seed):
    dist = np.random.default_rng(seed).dirichlet(np.ones(2**n))
    a, b = sample(dist, shots, seed), sample(dist, shots, seed)
    assert np.array_equal(a.counts, b.counts)
    assert a.counts.sum() == shots


@given(st.integers(1, 6), seeds)
def test_gibbs_inequality(n, seed):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(2**n))
    q = rng.dirichlet(np.ones(2**n))
    assert kld(p, q) >= -1e-12
    assert kld(p, p) == 0.0


@given(st.integers(1, 6), seeds)
def test_kld_vs_uniform_permutation_invariant(n, seed):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(2**n) * 0.3)
    assert abs(kld_vs_uniform(p) - kld_vs_uniform(rng.permutation(p))) < 1e-12


graphs = st.integers(2, 6).flatmap(
    lambda v: st.lists(
        st.tuples(st.integers(0, v - 1), st.integers(0, v - 1), st.floats(0.1, 10)),
        max_size=12,
    ).map(lambda es: Graph(v, tuple({(min(j, l), max(j, l)): (j, l, w) for j, l, w in es if j != l}.values())))
)


@given(graphs, st.data())
def test_cut_symmetry(g, data):
    x = data.draw(st.integers(0, 2**g.vertices - 1))
    flipped = x ^ (2**g.vertices - 1)
    assert math.isclose(maxcut_cost(g, x), maxcut_cost(g, flipped), rel_tol=0, abs_tol=1e-9)


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=8), st.data())
def test_subset_sum_additive(elements, data):
    inst = SubsetSumInstance(tuple(elements), 1)
    n = inst.n
    x = data.draw(st.integers(0, 2**n - 1))
    y = data.draw(st.integers(0, 2**n - 1)) & ~x
    assert subset_sum_cost(inst, x | y) == subset_sum_cost(inst, x) + subset_sum_cost(inst, y)


@given(st.floats(0.1, 100), st.integers(0, 50))
def test_linear_map_odd_multiples_hit_pi(S, t):
    phase = linear_phase_map(S * (2 * t + 1), S)
    assert abs(phase - math.pi) < 1e-9


@given(st.floats(0.1, 100), st.floats(-300, 300))
def test_triangular_map_pi_only_at_target(S, cost):
    phase = triangular_phase_map(cost, S)
    assert 0 <= phase <= math.pi
    if cost != S:
        assert phase < math.pi


@settings(max_examples=50)
@given(st.floats(0.1, 100), st.floats(0, 100), st.floats(0, 100))
def test_triangular_map_monotone_in_deviation(S, d1, d2):
    near, far = sorted((d1, d2))
    assert triangular_phase_map(S + near, S) >= triangular_phase_map(S + far, S)
