"""Tests for the discrete linearized simulator and decay measurement."""

import numpy as np
import pytest

from rollgap import dampsim as ds
from rollgap import rollwave as rw
from rollgap.errors import ConfigurationError, HyperbolicityError


@pytest.fixture(scope="module")
def setup_f3():
    p = rw.build_profile(3.0, n_grid=400)
    cd = rw.characteristics(p)
    eps = rw.default_epsilon(p, cd)
    w = rw.damping_weights(p, cd, eps, 1.0)
    return p, cd, w


def smooth_random(xc, X, seed, modes=8):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((2, modes))
    b = rng.standard_normal((2, modes))
    out = np.zeros((2, len(xc)))
    for m in range(modes):
        for c in range(2):
            out[c] += (a[c, m] * np.cos(2 * np.pi * (m + 1) * xc / X)
                       + b[c, m] * np.sin(2 * np.pi * (m + 1) * xc / X)) / (m + 1)
    return out


# ---------------------------------------------------------------------------
# compensator
# ---------------------------------------------------------------------------


class _StubFields:
    """Artificial characteristic fields for compensator identities."""

    def __init__(self, rng, n):
        self._a1 = -1.0 - rng.uniform(0.1, 1.0, n)
        self._a2 = rng.uniform(0.2, 1.0, n)
        self._b1 = rng.standard_normal(n)
        self._b2 = rng.standard_normal(n)

    def alpha1(self, x):
        return self._a1

    def alpha2(self, x):
        return self._a2

    def beta1(self, x):
        return self._b1

    def beta2(self, x):
        return self._b2


class _StubCD:
    def __init__(self, rng, n):
        self.grid = np.linspace(0, 1, n)
        self.fields = _StubFields(rng, n)


def test_kawashima_skew_and_cancellation():
    rng = np.random.default_rng(0)
    cd = _StubCD(rng, 40)
    K = ds.kawashima_K(cd)
    assert np.max(np.abs(K + K.transpose(0, 2, 1))) == 0.0
    f = cd.fields
    x = cd.grid
    for i in range(40):
        A = np.diag([f.alpha1(x)[i], f.alpha2(x)[i]])
        comm = K[i] @ A - A @ K[i]
        coupling = np.array([[0.0, f.beta1(x)[i]], [f.beta2(x)[i], 0.0]])
        sym = 0.5 * (coupling + coupling.T)
        assert np.max(np.abs(comm - sym)) < 1e-10


def test_kawashima_zero_coupling():
    rng = np.random.default_rng(1)
    cd = _StubCD(rng, 10)
    cd.fields._b1[:] = 0.0
    cd.fields._b2[:] = 0.0
    K = ds.kawashima_K(cd)
    assert np.max(np.abs(K)) == 0.0


def test_kawashima_hyperbolicity_guard():
    rng = np.random.default_rng(2)
    cd = _StubCD(rng, 10)
    cd.fields._a2[3] = cd.fields._a1[3]
    with pytest.raises(HyperbolicityError):
        ds.kawashima_K(cd)


def test_kawashima_on_profile(setup_f3):
    p, cd, w = setup_f3
    K = ds.kawashima_K(cd, w)
    assert K.shape == (len(cd.grid), 2, 2)
    assert np.max(np.abs(K + K.transpose(0, 2, 1))) == 0.0


# ---------------------------------------------------------------------------
# scheme sanity
# ---------------------------------------------------------------------------


def _advect_periodic(n, t_end):
    """Constant-speed periodic advection with the production flux kernel."""
    x = (np.arange(n) + 0.5) / n
    dx = np.full(n, 1.0 / n)
    u = np.exp(np.sin(2 * np.pi * x))
    speed = -0.7
    speeds_f = np.full(n + 1, speed)
    dt = 0.4 * (1.0 / n) / abs(speed)
    steps = int(round(t_end / dt))
    dt = t_end / steps

    def rhs(v):
        # periodic wrap supplies both inflow ghosts
        return -ds.upwind_flux_divergence(v, speeds_f, dx, inflow_left=v[-1],
                                          inflow_right=v[0])

    for _ in range(steps):
        k1 = rhs(u)
        a = u + dt * k1
        k2 = rhs(a)
        b = 0.75 * u + 0.25 * (a + dt * k2)
        k3 = rhs(b)
        u = u / 3.0 + 2.0 / 3.0 * (b + dt * k3)
    exact = np.exp(np.sin(2 * np.pi * (x - speed * t_end)))
    return np.max(np.abs(u - exact))


def test_constant_advection_first_order():
    e1 = _advect_periodic(100, 0.5)
    e2 = _advect_periodic(200, 0.5)
    assert e2 < e1 / 1.6  # first-order convergence
    assert e1 < 0.5


def test_zero_data_zero_trajectory(setup_f3):
    p, cd, w = setup_f3
    cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=64, t_end=1.0)
    traj = ds.run(cfg, np.zeros((2, 64)))
    assert traj.L2.max() == 0.0
    assert traj.energy.max() == 0.0
    assert np.all(traj.y == 0.0)


def test_linearity(setup_f3):
    p, cd, w = setup_f3
    cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=64, t_end=0.5)
    sim = ds.setup(cfg)
    u0a = smooth_random(sim.centers, p.X, 3)
    u0b = smooth_random(sim.centers, p.X, 4)
    ta = ds.run(cfg, u0a, 0.3, sim=sim)
    tb = ds.run(cfg, u0b, -0.1, sim=sim)
    tc = ds.run(cfg, 2.0 * u0a - 0.5 * u0b, 2.0 * 0.3 - 0.5 * (-0.1), sim=sim)
    za = np.concatenate([ta.states[-1].u1, ta.states[-1].u2, [ta.states[-1].y]])
    zb = np.concatenate([tb.states[-1].u1, tb.states[-1].u2, [tb.states[-1].y]])
    zc = np.concatenate([tc.states[-1].u1, tc.states[-1].u2, [tc.states[-1].y]])
    scale = np.max(np.abs(zc)) or 1.0
    assert np.max(np.abs(zc - (2.0 * za - 0.5 * zb))) < 1e-12 * max(1.0, scale)


def test_floquet_phase_periodicity(setup_f3):
    p, cd, w = setup_f3
    xi = 0.7
    sims = []
    for shift in (0.0, 2.0 * np.pi / p.X):
        cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=64, t_end=0.5,
                           floquet_xi=xi + shift)
        sim = ds.setup(cfg)
        u0 = smooth_random(sim.centers, p.X, 5)
        sims.append(ds.run(cfg, u0 + 0j, 0.1 + 0j, sim=sim))
    za = np.concatenate([sims[0].states[-1].u1, sims[0].states[-1].u2])
    zb = np.concatenate([sims[1].states[-1].u1, sims[1].states[-1].u2])
    assert np.max(np.abs(za - zb)) < 1e-12 * max(1.0, np.max(np.abs(za)))


def test_self_convergence_first_order(setup_f3):
    p, cd, w = setup_f3

    def final_state(N):
        cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=N, t_end=0.5)
        sim = ds.setup(cfg)
        u0 = np.stack([np.sin(2 * np.pi * sim.centers / p.X),
                       np.cos(2 * np.pi * sim.centers / p.X)])
        traj = ds.run(cfg, u0, 0.0, sim=sim)
        return sim.centers, traj.states[-1].u1

    x_ref, u_ref = final_state(512)
    errs = []
    for N in (64, 128):
        x, u = final_state(N)
        errs.append(np.max(np.abs(u - np.interp(x, x_ref, u_ref))))
    assert errs[1] < errs[0] / 1.5
    assert errs[1] < 0.2


def test_config_validation(setup_f3):
    p, cd, w = setup_f3
    with pytest.raises(ConfigurationError):
        ds.SimConfig(profile=p, cd=cd, weights=w, N=32)
    with pytest.raises(ConfigurationError):
        ds.SimConfig(profile=p, cd=cd, weights=w, N=64, cfl=1.5)
    with pytest.raises(ConfigurationError):
        ds.SimConfig(profile=p, cd=cd, weights=w, N=64, t_end=-1.0)


# ---------------------------------------------------------------------------
# decay and growth
# ---------------------------------------------------------------------------


def test_stable_profile_decay(setup_f3):
    p, cd, w = setup_f3
    cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=256, t_end=60.0,
                       n_outputs=300)
    sim = ds.setup(cfg)
    u0 = smooth_random(sim.centers, p.X, 42)
    traj = ds.deflated_run(cfg, u0)
    rep = ds.measure_decay(traj)
    assert rep.theta_fit > 0
    assert rep.r_squared > 0.99
    assert rep.deflated
    assert np.isfinite(rep.slaving_constant)
    # energy decays monotonically after the transient
    tail = traj.energy[traj.times > 0.3 * traj.times[-1]]
    assert np.all(np.diff(tail) < 1e-12 + 1e-6 * tail[:-1])


def test_theta_against_hf_abscissa(setup_f3):
    p, cd, w = setup_f3
    rep_idx = rw.stability_index(p, cd)
    cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=256, t_end=60.0)
    sim = ds.setup(cfg)
    u0 = smooth_random(sim.centers, p.X, 11)
    rep = ds.measure_decay(ds.deflated_run(cfg, u0))
    target = -2.0 * rep_idx.hf_abscissa
    assert rep.theta_fit > 0 and target > 0
    assert 1.0 / 30.0 < rep.theta_fit / target < 30.0


def test_sonic_only_data_decays(setup_f3):
    p, cd, w = setup_f3
    cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=256, t_end=60.0)
    sim = ds.setup(cfg)
    u0 = np.zeros((2, 256))
    u0[1] = np.sin(2 * np.pi * sim.centers / p.X) + 0.3
    traj = ds.deflated_run(cfg, u0)
    rep = ds.measure_decay(traj)
    assert rep.theta_fit > 0
    assert rep.r_squared > 0.99


def test_synthetic_instability_grows(setup_f3):
    p, cd, w = setup_f3
    rep_idx = rw.stability_index(p, cd)
    factor = 1.5 / rep_idx.index
    assert factor * rep_idx.index > 1.0
    cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=128, t_end=20.0,
                       a0_factor=factor)
    sim = ds.setup(cfg)
    u0 = smooth_random(sim.centers, p.X, 7)
    traj = ds.run(cfg, u0, sim=sim)
    assert traj.energy[-1] > 50.0 * traj.energy[0]


def test_one_period_map_growth_oracle(setup_f3):
    # dominant one-period multiplier exceeds 1 exactly in the inflated case
    p, cd, w = setup_f3

    def dominant_growth(a0_factor, periods=30):
        cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=64, t_end=1.0,
                           a0_factor=a0_factor)
        sim = ds.setup(cfg)
        rng = np.random.default_rng(8)
        u1 = rng.standard_normal(64)
        u2 = rng.standard_normal(64)
        y = 0.1
        steps = int(np.ceil(p.X / sim.dt))
        growths = []
        for k in range(periods):
            t = 0.0
            for _ in range(steps):
                u1, u2, y = sim.step(t, u1, u2, y)
                t += sim.dt
            norm = np.sqrt(np.sum(u1**2 + u2**2) + abs(y) ** 2)
            growths.append(norm)
            u1, u2, y = u1 / norm, u2 / norm, y / norm
        return np.median(growths[-10:])

    rep_idx = rw.stability_index(p, cd)
    assert dominant_growth(2.0 / rep_idx.index) > 1.05
    # the baseline dynamics has its slow cluster at modulus about one
    assert dominant_growth(1.0) < 1.05


def test_bounded_forcing_bounded_energy(setup_f3):
    p, cd, w = setup_f3

    def forcing(x, t):
        return np.stack([0.05 * np.sin(2 * np.pi * x / p.X) * np.cos(t),
                         0.05 * np.cos(2 * np.pi * x / p.X) * np.sin(1.3 * t)])

    cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=128, t_end=40.0,
                       forcing_F=forcing)
    traj = ds.run(cfg, np.zeros((2, 128)))
    assert not traj.blew_up
    assert np.all(np.isfinite(traj.energy))
    # the response saturates: the late maximum does not exceed the global one
    late = traj.energy[traj.times > 0.5 * traj.times[-1]]
    assert late.max() <= 1.05 * traj.energy.max()
    assert traj.energy.max() < 1e6


def test_energy_norm_equivalence(setup_f3):
    p, cd, w = setup_f3
    cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=128, t_end=1.0)
    sim = ds.setup(cfg)
    lo, hi = sim.equivalence
    assert lo > 0 and hi > lo
    rng = np.random.default_rng(9)
    for _ in range(20):
        u1 = rng.standard_normal(128)
        u2 = rng.standard_normal(128)
        l2, h1, en = sim.norms(u1, u2, 0.0)
        assert en >= 0.5 * lo * h1**2
        assert en <= 2.0 * hi * h1**2


def test_trajectory_records_shift(setup_f3):
    p, cd, w = setup_f3
    cfg = ds.SimConfig(profile=p, cd=cd, weights=w, N=64, t_end=1.0)
    sim = ds.setup(cfg)
    u0 = smooth_random(sim.centers, p.X, 12)
    traj = ds.run(cfg, u0, 0.0, sim=sim)
    assert np.any(np.abs(traj.y) > 0)  # traces drive the shift
    assert len(traj.states) == len(traj.times)
