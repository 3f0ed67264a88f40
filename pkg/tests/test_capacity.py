"""Cut-set bounds, the two independent optimizers, and the covariance form."""

import math

import numpy as np
import pytest

from relaycap import (
    BindingBound,
    ChannelConfig,
    CovarianceSearchSpec,
    CsiMode,
    GridSpec,
    MatrixBoundParams,
    PowerAllocation,
    Topology,
    achievable_rate,
    covariance_bounds,
    cutset_bounds,
    optimize_capacity,
    optimize_covariance_bound,
    phase_fading_capacity,
)

from helpers import diamond_config, random_single_relay, single_relay_config


def test_power_allocation_validation():
    alloc = PowerAllocation(p21=1.0, p31=0.5, pb1=0.25, theta=0.1)
    assert alloc.total == pytest.approx(1.75)
    with pytest.raises(ValueError, match="p21"):
        PowerAllocation(p21=-1.0, p31=0.0, pb1=0.0, theta=0.0)
    with pytest.raises(ValueError, match="theta"):
        PowerAllocation(p21=0.0, p31=0.0, pb1=0.0, theta=float("nan"))
    with pytest.raises(ValueError, match="alpha"):
        PowerAllocation(p21=0.0, p31=0.0, pb1=0.0, theta=0.0, alpha=float("inf"))


def test_cutset_all_power_direct():
    # everything on the beam aligned with the destination link: the broadcast
    # cut sees g31 * P1, the MAC cut adds the relay's own (incoherent) power
    cfg = single_relay_config(p1=2.0, p2=1.0, alpha=0.4, c32=0.8)
    alloc = PowerAllocation(p21=0.0, p31=2.0, pb1=0.0, theta=0.0)
    rd, mac = cutset_bounds(cfg, alloc)
    assert rd == pytest.approx(2.0)
    assert mac == pytest.approx(2.0 + 0.8**2)
    assert achievable_rate(cfg, alloc) == pytest.approx(min(rd, mac))


def test_cutset_relay_beam_and_coherent_terms():
    cfg = single_relay_config(p1=3.0, p2=1.0, alpha=0.4, c32=0.8)
    theta = 0.15
    alloc = PowerAllocation(p21=1.0, p31=1.0, pb1=1.0, theta=theta)
    rd, mac = cutset_bounds(cfg, alloc)
    # unit-norm gain vectors: g21 = g31 = 1
    assert rd == pytest.approx(1.0 + math.cos(0.4 - theta) ** 2)
    assert mac == pytest.approx(
        1.0 + math.cos(theta) ** 2 + (math.sqrt(1.0) + 0.8 * 1.0) ** 2
    )


def test_cutset_scales_with_noise():
    ref = single_relay_config(p1=2.0, p2=1.0)
    half = single_relay_config(p1=2.0, p2=1.0, noise_psd=0.5)
    alloc = PowerAllocation(p21=1.0, p31=0.5, pb1=0.5, theta=0.2)
    rd_ref, mac_ref = cutset_bounds(ref, alloc)
    rd_half, mac_half = cutset_bounds(half, alloc)
    # same Watts through half the noise: the relay-decode cut doubles exactly;
    # the MAC cut has the coherent cross term, still scaling as 1/N0
    assert rd_half == pytest.approx(2.0 * rd_ref)
    assert mac_half == pytest.approx(2.0 * mac_ref)


def test_cutset_rejects_over_budget():
    cfg = single_relay_config(p1=2.0)
    alloc = PowerAllocation(p21=1.5, p31=1.0, pb1=0.0, theta=0.0)
    with pytest.raises(ValueError, match="exceeds the budget"):
        cutset_bounds(cfg, alloc)


def test_cutset_requires_synchronous_single_relay():
    alloc = PowerAllocation(p21=0.0, p31=1.0, pb1=0.0, theta=0.0)
    with pytest.raises(ValueError, match="single-relay topology"):
        cutset_bounds(diamond_config(csi=CsiMode.SYNCHRONOUS), alloc)
    with pytest.raises(ValueError, match="csi mode"):
        cutset_bounds(single_relay_config(csi=CsiMode.PHASE_FADING), alloc)


def test_optimize_weak_relay_link_reduces_to_direct():
    # when the source-to-relay link is no stronger than the direct link the
    # broadcast cut caps the rate at g31 * P1 / N0, achieved without the relay
    rng = np.random.default_rng(8)
    for _ in range(5):
        c21 = rng.normal(size=2) + 1j * rng.normal(size=2)
        c31 = rng.normal(size=2) + 1j * rng.normal(size=2)
        if np.vdot(c21, c21).real > np.vdot(c31, c31).real:
            c21, c31 = c31, c21
        cfg = ChannelConfig(
            topology=Topology.SINGLE_RELAY,
            csi=CsiMode.SYNCHRONOUS,
            powers={"P1": 2.5, "P2": 1.5},
            gains={"c21": c21, "c31": c31, "c32": np.array([0.7])},
            noise_psd=0.8,
        )
        g31 = float(np.vdot(c31, c31).real)
        result = optimize_capacity(cfg)
        assert result.rate == pytest.approx(g31 * 2.5 / 0.8, rel=1e-9)
        assert result.binding_bound is BindingBound.RELAY_DECODE


def test_optimize_result_is_achievable_and_binding_consistent():
    rng = np.random.default_rng(9)
    for _ in range(8):
        cfg = random_single_relay(rng)
        result = optimize_capacity(cfg)
        alloc = result.allocation
        assert isinstance(alloc, PowerAllocation)
        assert alloc.total <= cfg.powers["P1"] * (1 + 1e-9)
        assert achievable_rate(cfg, alloc) == pytest.approx(result.rate, rel=1e-9, abs=1e-12)
        rd, mac = cutset_bounds(cfg, alloc)
        expect = BindingBound.RELAY_DECODE if rd <= mac else BindingBound.MAC_COMBINE
        assert result.binding_bound is expect


def test_optimize_beats_hand_allocations():
    cfg = single_relay_config(p1=2.0, p2=1.0, alpha=0.4, c32=0.8)
    best = optimize_capacity(cfg).rate
    for alloc in (
        PowerAllocation(p21=0.0, p31=2.0, pb1=0.0, theta=0.0),
        PowerAllocation(p21=2.0, p31=0.0, pb1=0.0, theta=0.2),
        PowerAllocation(p21=1.0, p31=0.5, pb1=0.5, theta=0.1),
    ):
        assert best >= achievable_rate(cfg, alloc) - 1e-12


def test_optimize_power_scaling():
    # rates are linear in power over noise: scaling every budget by 4 scales
    # the optimum by 4 (the coherent cross term is degree one as well)
    cfg = single_relay_config(p1=1.3, p2=0.7, alpha=0.5, c32=1.1)
    scaled = single_relay_config(p1=4 * 1.3, p2=4 * 0.7, alpha=0.5, c32=1.1)
    r1 = optimize_capacity(cfg).rate
    r4 = optimize_capacity(scaled).rate
    assert r4 == pytest.approx(4.0 * r1, rel=1e-10)
    # and scaling noise together with power changes nothing
    both = single_relay_config(p1=4 * 1.3, p2=4 * 0.7, alpha=0.5, c32=1.1, noise_psd=4.0)
    assert optimize_capacity(both).rate == pytest.approx(r1, rel=1e-10)


def test_optimize_grid_spec_validation():
    with pytest.raises(ValueError, match="at least two"):
        GridSpec(theta_points=1)
    with pytest.raises(ValueError, match="polish_iters"):
        GridSpec(polish_iters=-1)
    # a coarse grid still lands close thanks to the polish stage
    cfg = single_relay_config(p1=2.0, p2=1.0, alpha=0.6, c32=0.9)
    fine = optimize_capacity(cfg).rate
    coarse = optimize_capacity(cfg, GridSpec(theta_points=9)).rate
    assert coarse == pytest.approx(fine, rel=1e-6)


def test_phase_fading_capacity_hand_case():
    # direct-link cut min: max(2, 1) * 2 = 4 against 1 * 2 + 1 * 1 = 3
    cfg = single_relay_config(
        p1=2.0, p2=1.0, alpha=0.0, c32=1.0, csi=CsiMode.PHASE_FADING, scale21=math.sqrt(2.0)
    )
    assert phase_fading_capacity(cfg) == pytest.approx(3.0)


def test_phase_fading_capacity_monotone_in_relay_power():
    rates = [
        phase_fading_capacity(
            single_relay_config(p1=2.0, p2=p2, csi=CsiMode.PHASE_FADING, c32=0.9)
        )
        for p2 in (0.0, 0.5, 1.0, 5.0, 50.0)
    ]
    assert rates == sorted(rates)
    # saturates at the broadcast cut
    assert rates[-1] == pytest.approx(max(1.0, 1.0) * 2.0)


def test_phase_fading_capacity_requires_phase_fading():
    with pytest.raises(ValueError, match="csi mode"):
        phase_fading_capacity(single_relay_config())


def test_matrix_params_validation():
    eye = np.eye(2)
    u = np.array([1.0, 0.0])
    MatrixBoundParams(a=0.1 * eye, b=0.1 * eye, beta=0.5, u=u)
    with pytest.raises(ValueError, match="2x2"):
        MatrixBoundParams(a=np.eye(3), b=eye, beta=0.0, u=u)
    with pytest.raises(ValueError, match="u must have 2"):
        MatrixBoundParams(a=eye, b=eye, beta=0.0, u=np.ones(3))
    with pytest.raises(ValueError, match="finite"):
        MatrixBoundParams(a=eye * np.nan, b=eye, beta=0.0, u=u)


def test_covariance_bounds_silent_source():
    cfg = single_relay_config(p1=2.0, p2=1.5, c32=0.8)
    params = MatrixBoundParams(a=np.zeros((2, 2)), b=np.zeros((2, 2)), beta=0.0,
                               u=np.array([1.0, 0.0]))
    rd, mac = covariance_bounds(cfg, params)
    assert rd == 0.0
    assert mac == pytest.approx(0.8**2 * 1.5)


def test_covariance_bounds_full_coherent():
    # beta = 1 with u on the destination gain vector: the MAC cut becomes the
    # fully coherent square (sqrt(g31 P1) + |c32| sqrt(P2))^2 / N0
    cfg = single_relay_config(p1=2.0, p2=1.0, alpha=0.4, c32=0.8)
    c31 = cfg.gain("c31")
    u = c31 / np.linalg.norm(c31)
    params = MatrixBoundParams(a=np.zeros((2, 2)), b=np.zeros((2, 2)), beta=1.0, u=u)
    rd, mac = covariance_bounds(cfg, params)
    assert rd == 0.0
    assert mac == pytest.approx((math.sqrt(2.0) + 0.8) ** 2)


def test_covariance_form_reduces_to_power_form():
    # rank-one blocks aligned with the beams of a power split reproduce
    # cutset_bounds exactly, including through a non-unit noise density
    alpha = 0.4
    cfg = single_relay_config(p1=2.0, p2=1.0, alpha=alpha, c32=0.8, noise_psd=0.5)
    c31 = cfg.gain("c31").real
    for p21, p31, pb1, theta in [
        (0.5, 1.0, 0.5, 0.15),
        (1.2, 0.3, 0.5, 0.0),
        (0.0, 1.0, 1.0, 0.3),
        (2.0, 0.0, 0.0, 0.4),
    ]:
        alloc = PowerAllocation(p21=p21, p31=p31, pb1=pb1, theta=theta)
        v = np.array([math.cos(alpha - theta), math.sin(alpha - theta)])
        params = MatrixBoundParams(
            a=p21 * np.outer(v, v),
            b=p31 * np.outer(c31, c31),
            beta=math.sqrt(pb1 / cfg.powers["P1"]),
            u=c31,
        )
        np.testing.assert_allclose(
            covariance_bounds(cfg, params), cutset_bounds(cfg, alloc), rtol=1e-12, atol=1e-12
        )


def test_covariance_bounds_validation():
    cfg = single_relay_config(p1=2.0)
    u = np.array([1.0, 0.0])
    with pytest.raises(ValueError, match="not positive semidefinite"):
        covariance_bounds(cfg, MatrixBoundParams(a=-np.eye(2), b=np.zeros((2, 2)),
                                                 beta=0.0, u=u))
    with pytest.raises(ValueError, match="not Hermitian"):
        covariance_bounds(
            cfg,
            MatrixBoundParams(a=np.array([[1.0, 1.0], [0.0, 1.0]]) * 0.1,
                              b=np.zeros((2, 2)), beta=0.0, u=u),
        )
    with pytest.raises(ValueError, match="beta"):
        covariance_bounds(cfg, MatrixBoundParams(a=np.zeros((2, 2)), b=np.zeros((2, 2)),
                                                 beta=1.5, u=u))
    with pytest.raises(ValueError, match="unit norm"):
        covariance_bounds(cfg, MatrixBoundParams(a=np.zeros((2, 2)), b=np.zeros((2, 2)),
                                                 beta=0.0, u=2.0 * u))
    with pytest.raises(ValueError, match="exceeding the budget"):
        covariance_bounds(cfg, MatrixBoundParams(a=1.5 * np.eye(2), b=np.zeros((2, 2)),
                                                 beta=0.0, u=u))


def test_covariance_optimizer_matches_power_optimizer():
    rng = np.random.default_rng(10)
    for _ in range(5):
        cfg = random_single_relay(rng)
        r_power = optimize_capacity(cfg).rate
        r_cov = optimize_covariance_bound(cfg).rate
        assert r_cov == pytest.approx(r_power, rel=1e-6, abs=1e-9)


def test_covariance_optimizer_internal_consistency():
    cfg = single_relay_config(p1=2.0, p2=1.0, alpha=0.4, c32=0.8)
    result = optimize_covariance_bound(cfg)
    params = result.allocation
    assert isinstance(params, MatrixBoundParams)
    rd, mac = covariance_bounds(cfg, params)
    assert min(rd, mac) == pytest.approx(result.rate, rel=1e-9)
    expect = BindingBound.RELAY_DECODE if rd <= mac else BindingBound.MAC_COMBINE
    assert result.binding_bound is expect
    # the relay block comes out (numerically) rank one
    eigs = np.linalg.eigvalsh(params.a)
    assert eigs[0] <= 1e-9 * max(1.0, eigs[-1])


def test_covariance_optimizer_zero_source_power():
    cfg = single_relay_config(p1=0.0, p2=1.0, c32=0.8)
    result = optimize_covariance_bound(cfg)
    assert result.rate == pytest.approx(0.0, abs=1e-12)
    assert optimize_capacity(cfg).rate == pytest.approx(0.0, abs=1e-12)


def test_covariance_search_spec_validation():
    with pytest.raises(ValueError, match="at least two"):
        CovarianceSearchSpec(angle_points=1)
    with pytest.raises(ValueError, match="polish_iters"):
        CovarianceSearchSpec(polish_iters=-2)
    with pytest.raises(ValueError, match="residual_points"):
        CovarianceSearchSpec(residual_points=1)
