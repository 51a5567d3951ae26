import numpy as np
import pytest
from scipy.linalg import expm

from dqsim import lindblad
from dqsim.hamiltonians import build_h1, build_h2, build_itc, excitation_number, h2_frame
from dqsim.hilbert import DensityMatrix, Operator, ShapeMismatchError, SpaceShape, ladder, number, product_state
from dqsim.lindblad import (
    NumericalAbort,
    Segment,
    evolve_master,
    itc_schedule,
    lindblad_rhs,
    reachable_indices,
    unitary_schedule_oracle,
)
from dqsim.metrics import trace_distance


def liouvillian(h, a, kappa):
    """Row-major vectorized generator, vec(A X B) = (A kron B^T) vec(X)."""
    d = h.shape[0]
    eye = np.eye(d)
    n = a.conj().T @ a
    return (-1j * (np.kron(h, eye) - np.kron(eye, h.T))
            + kappa * (np.kron(a, a.conj()) - 0.5 * np.kron(n, eye) - 0.5 * np.kron(eye, n.T)))


def exact_schedule(rho0, segments, kappa):
    """Oracle: dense superoperator exponential per segment."""
    a = ladder("lower", rho0.shape).matrix
    v = rho0.matrix.reshape(-1)
    for seg in segments:
        v = expm(liouvillian(seg.H.matrix, a, kappa) * seg.duration) @ v
    d = rho0.shape.total_dim
    return v.reshape(d, d)


def random_density(shape, seed):
    rng = np.random.default_rng(seed)
    d = shape.total_dim
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = a @ a.conj().T
    return DensityMatrix(shape, m / np.trace(m))


def test_rhs_kappa_zero_is_commutator():
    shape = SpaceShape(1, 3)
    h = build_h1(1, 1.0, 0.7, 0.3, 3)
    rho = random_density(shape, 1)
    expected = -1j * (h.matrix @ rho.matrix - rho.matrix @ h.matrix)
    np.testing.assert_allclose(lindblad_rhs(rho, h, 0.0), expected, atol=1e-14)


def test_rhs_is_traceless():
    shape = SpaceShape(2, 4)
    h = build_itc(2, 1.0, 0.8, 0.3, 0.5, 4).sum
    for seed in range(5):
        assert abs(np.trace(lindblad_rhs(random_density(shape, seed), h, 0.9))) < 1e-12


def test_rhs_photon_decay_rate():
    shape = SpaceShape(1, 4)
    rho = product_state(shape, "1", [0, 1]).density()
    kappa = 0.7
    drho = lindblad_rhs(rho, Operator.zero(shape), kappa)
    n = number(shape).matrix
    # d<n>/dt = -kappa <n>
    assert np.trace(n @ drho).real == pytest.approx(-kappa * 1.0)


def test_rhs_validation():
    shape = SpaceShape(1, 3)
    with pytest.raises(ShapeMismatchError):
        lindblad_rhs(np.eye(4) / 4, build_h1(1, 1, 1, 1, 3), 0.1)
    with pytest.raises(ValueError):
        lindblad_rhs(random_density(shape, 0), build_h1(1, 1, 1, 1, 3), -1.0)


def test_segment_validation():
    h = build_h1(1, 1, 1, 1, 2)
    with pytest.raises(ValueError):
        Segment(h, 0.0)
    with pytest.raises(ValueError):
        Segment(Operator(h.shape, np.triu(np.ones((4, 4)))), 1.0)


def test_reachable_subspace_follows_excitations():
    shape = SpaceShape(3, 6)
    h = build_itc(3, 1.0, 0.9, 0.2, 0.4, 6).sum
    rho0 = product_state(shape, "011", [0, 0, 1]).density()  # 3 excitations
    idx = reachable_indices(np.abs(rho0.matrix).sum(axis=1) > 0,
                            [h.matrix, ladder("lower", shape).matrix])
    n_exc = np.diag(excitation_number(shape).matrix).real
    assert set(idx) == set(np.flatnonzero(n_exc <= 3))


def test_matches_superoperator_oracle_with_decay():
    n, d = 2, 4
    segs = itc_schedule(n, 1.0, 0.8, 0.6, 1.5, 0.3, 0.4, t=1.2, s=2, fock_dim=d)
    rho0 = product_state(SpaceShape(n, d), "01", [0, 1, 1]).density()
    kappa = 0.35
    res = evolve_master(rho0, segs, kappa, dt=0.01)
    oracle = exact_schedule(rho0, segs, kappa)
    assert np.abs(res.final.matrix - oracle).max() < 1e-8
    assert res.subspace_dim < rho0.shape.total_dim


def test_fourth_order_convergence():
    shape = SpaceShape(1, 4)
    h = build_h1(1, 1.0, 1.3, 0.4, 4)
    rho0 = product_state(shape, "0", [0, 1, 1]).density()
    segs = [Segment(h, 1.0)]
    oracle = exact_schedule(rho0, segs, 0.5)
    errs = [np.abs(evolve_master(rho0, segs, 0.5, dt=dt).final.matrix - oracle).max() for dt in (0.1, 0.05)]
    assert errs[0] / errs[1] > 12


def test_kappa_zero_matches_unitary_oracle():
    n, d = 3, 4
    segs = itc_schedule(n, 1.0, 0.9, 0.5, 2.0, 0.4, 0.7, t=2.0, s=3, fock_dim=d)
    rho0 = product_state(SpaceShape(n, d), "011", [0, 1, 1]).density()
    res = evolve_master(rho0, segs, 0.0, dt=0.01)
    assert trace_distance(res.final, unitary_schedule_oracle(rho0, segs)) < 1e-7


def test_photon_decay_law():
    shape = SpaceShape(1, 4)
    rho0 = product_state(shape, "1", [0, 0, 1]).density()
    kappa, dt = 0.8, 1e-3
    segs = [Segment(Operator.zero(shape), 0.25) for _ in range(8)]
    res = evolve_master(rho0, segs, kappa, dt=dt)
    n_op = number(shape)
    for t, rho in zip(res.times, res.states):
        assert rho.expect(n_op) == pytest.approx(2 * np.exp(-kappa * t), abs=1e-6)


def test_expanded_h2_schedule_matches_compact():
    n, d = 3, 3
    kw = dict(omega1=1.0, Omega1=0.9, g=0.5, omega2=1.6, Omega2=0.2, J=0.6, t=1.5, s=2, fock_dim=d)
    rho0 = product_state(SpaceShape(n, d), "011", [0, 1, 1]).density()
    compact = evolve_master(rho0, itc_schedule(n, **kw), 0.0).final
    expanded = evolve_master(rho0, itc_schedule(n, **kw, expand=True), 0.0).final
    assert trace_distance(compact, expanded) < 1e-9
    assert len(itc_schedule(n, **kw)) == 4
    assert len(itc_schedule(n, **kw, expand=True)) == 2 * (1 + (n - 1))


def test_schedule_structure():
    segs = itc_schedule(4, 1.0, 1.0, 1.0, 3.0, 0.3, 1.0, t=0.6, s=1, fock_dim=2)
    assert len(segs) == 2
    assert all(seg.duration == pytest.approx(0.6) for seg in segs)
    wp, Wp = h2_frame(4, 3.0, 0.3)
    np.testing.assert_allclose(segs[1].H.matrix, build_h2(4, wp, Wp, 1.0, 2).matrix)


def test_purity_decreases_while_single_photon_decays():
    shape = SpaceShape(1, 3)
    h = 1.3 * number(shape)
    kappa = 0.6
    rho0 = product_state(shape, "1", [0, 1]).density()
    # purity (1-p)^2 + p^2 with p = e^{-kappa t} falls until kappa t = ln 2
    n_seg = 10
    res = evolve_master(rho0, [Segment(h, np.log(2) / kappa / n_seg) for _ in range(n_seg)], kappa)
    purities = [r.purity() for r in res.states]
    assert all(b <= a + 1e-12 for a, b in zip(purities, purities[1:]))
    p = np.exp(-kappa * res.times)
    np.testing.assert_allclose(purities, (1 - p) ** 2 + p**2, atol=1e-9)


def test_mixed_state_purity_rises_toward_vacuum():
    shape = SpaceShape(1, 5)
    rho0 = DensityMatrix(shape, np.diag(np.kron([1.0, 0.0], [0.1, 0.2, 0.3, 0.4, 0.0])))
    res = evolve_master(rho0, [Segment(1.3 * number(shape), 2.0) for _ in range(5)], 0.6)
    purities = [r.purity() for r in res.states]
    assert purities[-1] > purities[0]
    assert max(purities) <= 1 + 1e-8


def test_small_kappa_limit_is_linear():
    n, d = 2, 3
    segs = itc_schedule(n, 1.0, 0.8, 0.6, 1.5, 0.3, 0.4, t=1.0, s=2, fock_dim=d)
    rho0 = product_state(SpaceShape(n, d), "01", [0, 1, 1]).density()
    closed = evolve_master(rho0, segs, 0.0).final
    devs = [trace_distance(evolve_master(rho0, segs, k, dt=0.01).final, closed) for k in (1e-4, 5e-5)]
    assert devs[0] / devs[1] == pytest.approx(2.0, rel=1e-2)


def test_diagnostics_and_state_validity():
    n, d = 2, 5
    segs = itc_schedule(n, 1.0, 0.8, 0.6, 1.5, 0.3, 0.4, t=1.0, s=3, fock_dim=d)
    rho0 = product_state(SpaceShape(n, d), "01", [0, 1, 1]).density()
    res = evolve_master(rho0, segs, 0.2)
    assert res.max_trace_drift < 1e-8
    assert res.min_eigenvalue > -1e-8
    assert res.max_purity <= 1 + 1e-8
    assert res.top_fock_population == 0.0  # at most 3 excitations, n = 4 is unreachable
    assert len(res.states) == len(segs) + 1
    np.testing.assert_allclose(res.times[-1], 1.0 * 2)


def test_top_fock_population_is_monitored():
    shape = SpaceShape(1, 3)
    h = build_h1(1, 1.0, 1.0, 0.5, 3)
    rho0 = product_state(shape, "0", [0, 0, 1]).density()  # starts in the top level
    res = evolve_master(rho0, [Segment(h, 0.1)], 0.1)
    assert res.top_fock_population > 0.5


def test_trace_drift_aborts(monkeypatch):
    shape = SpaceShape(1, 3)
    rho0 = product_state(shape, "0", [0, 1]).density()
    seg = Segment(build_h1(1, 1.0, 1.0, 0.5, 3), 1.0)
    # a generator that leaks trace must trip the guard
    monkeypatch.setattr(lindblad, "_dissipate", lambda a, ad, n, rho: a @ rho @ ad)
    with pytest.raises(NumericalAbort, match="trace drift"):
        evolve_master(rho0, [seg], 0.5, dt=0.1)
