"""Shared builders for test configs.

All factories return fresh ChannelConfig instances with simple, hand-checkable
geometry so individual tests can state expected numbers inline.
"""

import numpy as np

from relaycap import ChannelConfig, CsiMode, Topology


def single_relay_config(
    p1=2.0,
    p2=1.0,
    noise_psd=1.0,
    alpha=0.4,
    c32=0.8,
    csi=CsiMode.SYNCHRONOUS,
    scale21=1.0,
    scale31=1.0,
):
    """Single-relay network with c21 on the x-axis and c31 at angle alpha."""
    c21 = scale21 * np.array([1.0, 0.0])
    c31 = scale31 * np.array([np.cos(alpha), np.sin(alpha)])
    return ChannelConfig(
        topology=Topology.SINGLE_RELAY,
        csi=csi,
        powers={"P1": p1, "P2": p2},
        gains={"c21": c21, "c31": c31, "c32": np.array([c32])},
        noise_psd=noise_psd,
    )


def diamond_config(
    p1=2.0,
    p2=1.0,
    p3=1.0,
    noise_psd=1.0,
    c21=(1.0, 0.0),
    c31=(0.6, 0.8),
    c42=1.0,
    c43=1.0,
    csi=CsiMode.PHASE_FADING,
):
    """Two-relay diamond network; defaults keep every gain easy to square."""
    return ChannelConfig(
        topology=Topology.TWO_RELAY_DIAMOND,
        csi=csi,
        powers={"P1": p1, "P2": p2, "P3": p3},
        gains={
            "c21": np.asarray(c21, dtype=complex),
            "c31": np.asarray(c31, dtype=complex),
            "c42": np.array([c42], dtype=complex),
            "c43": np.array([c43], dtype=complex),
        },
        noise_psd=noise_psd,
    )


def random_single_relay(rng, csi=CsiMode.SYNCHRONOUS):
    """Random complex geometry with powers and noise away from the unit scale."""
    return ChannelConfig(
        topology=Topology.SINGLE_RELAY,
        csi=csi,
        powers={"P1": float(rng.uniform(0.2, 5.0)), "P2": float(rng.uniform(0.2, 5.0))},
        gains={
            "c21": rng.normal(size=2) + 1j * rng.normal(size=2),
            "c31": rng.normal(size=2) + 1j * rng.normal(size=2),
            "c32": rng.normal(size=1) + 1j * rng.normal(size=1),
        },
        noise_psd=float(rng.uniform(0.5, 2.0)),
    )


def random_diamond(rng, csi=CsiMode.PHASE_FADING):
    return ChannelConfig(
        topology=Topology.TWO_RELAY_DIAMOND,
        csi=csi,
        powers={
            "P1": float(rng.uniform(0.2, 5.0)),
            "P2": float(rng.uniform(0.2, 5.0)),
            "P3": float(rng.uniform(0.2, 5.0)),
        },
        gains={
            "c21": rng.normal(size=2) + 1j * rng.normal(size=2),
            "c31": rng.normal(size=2) + 1j * rng.normal(size=2),
            "c42": rng.normal(size=1) + 1j * rng.normal(size=1),
            "c43": rng.normal(size=1) + 1j * rng.normal(size=1),
        },
        noise_psd=float(rng.uniform(0.5, 2.0)),
    )
