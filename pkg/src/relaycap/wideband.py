"""Numerical verification of the wideband mutual-information limits.

Every capacity expression in this package is a low-power limit of the form
lim_B B * I(...) = (signal variance seen by the receiver) / N0, with the
receiver noise variance growing as N0 * B. The checkers here sweep a list of
bandwidths, compute the scaled mutual information B * I at each one, and
compare against the variance-ratio target:

* constant phase, Gaussian input: B * log(1 + var[c^H X] / (N0 B)), evaluated
  in closed form for a caller-chosen input covariance;
* phase fading: the closed form averaged over uniform i.i.d. link phases for
  a fully correlated Gaussian input, converging to sum |c_i|^2 var_i / N0
  because phase averaging kills every cross term;
* discrete joints (U, X): exact Gauss-Hermite integration of the discrete-
  input mutual information (Monte Carlo beyond 16 support points), used to
  verify the conditional-variance decomposition
  B*I(U;Y1) -> (var[c1^H X] - E var[c1^H X | U]) / N0 and
  B*I(X;Y2|U) -> E var[c2^H X | U] / N0.

Stochastic checkers take an explicit seed and derive one substream per
bandwidth index, so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrices import FiniteJoint, eigenvalues_ascending, is_hermitian

__all__ = [
    "DEFAULT_BANDWIDTHS",
    "gaussian_scaled_mi",
    "LimitCheckReport",
    "check_limit_constant_phase",
    "check_limit_phase_fading",
    "ConditionalLimitReports",
    "check_conditional_limits",
]

DEFAULT_BANDWIDTHS = (1e1, 1e2, 1e3, 1e4, 1e5)

_PHASE_CHUNK = 1_000_000


def gaussian_scaled_mi(signal_var: float, noise_psd: float, bandwidth: float) -> float:
    """Scaled Gaussian mutual information B * log(1 + signal_var / (N0 B)) in nats/s.

    Monotone increasing in bandwidth and bounded above by its limit
    signal_var / noise_psd.
    """
    if not (math.isfinite(signal_var) and signal_var >= 0.0):
        raise ValueError(f"signal_var must be finite and >= 0, got {signal_var}")
    if not (math.isfinite(noise_psd) and noise_psd > 0.0):
        raise ValueError(f"noise_psd must be finite and positive, got {noise_psd}")
    if not (math.isfinite(bandwidth) and bandwidth > 0.0):
        raise ValueError(f"bandwidth must be finite and positive, got {bandwidth}")
    return bandwidth * math.log1p(signal_var / (noise_psd * bandwidth))


@dataclass(frozen=True, eq=False)
class LimitCheckReport:
    """One bandwidth sweep of B * I values against a variance-ratio target.

    tolerance is the absolute threshold the convergence flag was judged
    against (relative tolerance times the target, or the raw tolerance for a
    zero target). standard_errors is populated by Monte Carlo checkers.
    """

    bandwidths: np.ndarray
    scaled_mi: np.ndarray
    target: float
    converged: bool
    final_abs_err: float
    tolerance: float
    standard_errors: np.ndarray | None = None

    def __post_init__(self):
        b = np.asarray(self.bandwidths, dtype=float)
        v = np.asarray(self.scaled_mi, dtype=float)
        if b.shape != v.shape:
            raise ValueError("bandwidths and scaled_mi must have equal length")
        b.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "bandwidths", b)
        object.__setattr__(self, "scaled_mi", v)


def _validate_bandwidths(bandwidths) -> np.ndarray:
    b = np.asarray(bandwidths, dtype=float).reshape(-1)
    if b.size == 0:
        raise ValueError("at least one bandwidth is required")
    if np.any(~np.isfinite(b)) or np.any(b <= 0):
        raise ValueError("bandwidths must be finite and positive")
    if np.any(np.diff(b) <= 0):
        raise ValueError("bandwidths must be strictly ascending")
    return b


def _finish_report(bandwidths, values, target, rel_tol, ses=None) -> LimitCheckReport:
    abs_tol = rel_tol * abs(target) if target != 0.0 else rel_tol
    err = float(abs(values[-1] - target))
    return LimitCheckReport(
        bandwidths=bandwidths,
        scaled_mi=np.asarray(values, dtype=float),
        target=float(target),
        converged=err <= abs_tol,
        final_abs_err=err,
        tolerance=abs_tol,
        standard_errors=None if ses is None else np.asarray(ses, dtype=float),
    )


def check_limit_constant_phase(
    gains,
    input_var,
    noise_psd: float,
    bandwidths=DEFAULT_BANDWIDTHS,
    covariance=None,
    rel_tol: float = 1e-3,
) -> LimitCheckReport:
    """Sweep B * I for a Gaussian input on a constant-phase vector channel.

    The target is var[c^H X] / N0. By default the input covariance is the
    rank-one matrix aligned with the gain vector carrying the full budget
    sum(input_var), the maximizer of var[c^H X] under a trace constraint;
    pass an explicit Hermitian PSD covariance to check any other input.
    """
    c = np.asarray(gains, dtype=complex).reshape(-1)
    var = np.asarray(input_var, dtype=float).reshape(-1)
    if var.size != c.size:
        raise ValueError(f"input_var must have {c.size} entries, got {var.size}")
    if np.any(var < 0) or np.any(~np.isfinite(var)):
        raise ValueError("input_var entries must be finite and >= 0")
    b = _validate_bandwidths(bandwidths)

    if covariance is None:
        budget = float(var.sum())
        norm = np.linalg.norm(c)
        if norm > 0.0 and budget > 0.0:
            unit = c / norm
            cov = budget * np.outer(unit, unit.conj())
        else:
            cov = np.zeros((c.size, c.size), dtype=complex)
    else:
        cov = np.asarray(covariance, dtype=complex)
        if cov.shape != (c.size, c.size):
            raise ValueError(f"covariance must have shape {(c.size, c.size)}, got {cov.shape}")
        if not is_hermitian(cov, 1e-9):
            raise ValueError("covariance must be Hermitian")
        if eigenvalues_ascending(cov, 1e-9)[0] < -1e-9:
            raise ValueError("covariance must be positive semidefinite")

    signal_var = float(np.real(c.conj() @ cov @ c))
    signal_var = max(signal_var, 0.0)
    target = signal_var / noise_psd
    values = [gaussian_scaled_mi(signal_var, noise_psd, bk) for bk in b]
    return _finish_report(b, values, target, rel_tol)


def check_limit_phase_fading(
    gain_mags,
    input_var,
    noise_psd: float,
    bandwidths=DEFAULT_BANDWIDTHS,
    num_phase_samples: int = 100_000,
    *,
    rng_seed: int,
    rel_tol: float = 1e-3,
) -> LimitCheckReport:
    """Sweep the phase-averaged B * I against sum |c_i|^2 var_i / N0.

    The input is the fully correlated Gaussian X_i = sqrt(var_i) * S, the
    hardest case for the limit: conditioned on the link phases its received
    variance |sum |c_i| e^{-j phi_i} sqrt(var_i)|^2 swings with every draw,
    and only the uniform phase average removes the cross terms. Each
    bandwidth gets its own seeded substream.

    The estimator subtracts a first-order control variate: the received
    variance has exactly known mean sum |c_i|^2 var_i (uniform phases kill
    every cross term), so removing its linear contribution leaves only the
    curvature of log1p as noise. The estimate stays unbiased; the reported
    standard errors are those of the corrected samples.
    """
    mags = np.abs(np.asarray(gain_mags, dtype=float).reshape(-1))
    var = np.asarray(input_var, dtype=float).reshape(-1)
    if var.size != mags.size:
        raise ValueError(f"input_var must have {mags.size} entries, got {var.size}")
    if np.any(var < 0) or np.any(~np.isfinite(var)):
        raise ValueError("input_var entries must be finite and >= 0")
    if num_phase_samples < 1:
        raise ValueError("num_phase_samples must be >= 1")
    if noise_psd <= 0 or not math.isfinite(noise_psd):
        raise ValueError(f"noise_psd must be finite and positive, got {noise_psd}")
    b = _validate_bandwidths(bandwidths)

    amps = mags * np.sqrt(var)
    target = float(amps @ amps) / noise_psd

    streams = np.random.SeedSequence(rng_seed).spawn(b.size)
    values = np.empty(b.size)
    ses = np.empty(b.size)
    mean_v = float(amps @ amps)
    for idx, bk in enumerate(b):
        rng = np.random.default_rng(streams[idx])
        slope = 1.0 / (noise_psd + mean_v / bk)  # d/dv of the closed form at mean_v
        total = 0.0
        total_sq = 0.0
        remaining = num_phase_samples
        while remaining > 0:
            n = min(remaining, _PHASE_CHUNK)
            phases = rng.uniform(0.0, 2.0 * np.pi, size=(n, amps.size))
            received = np.exp(1j * phases) @ amps
            v = received.real**2 + received.imag**2
            sample = bk * np.log1p(v / (noise_psd * bk)) - slope * (v - mean_v)
            total += float(sample.sum())
            total_sq += float(sample @ sample)
            remaining -= n
        mean = total / num_phase_samples
        var_est = max(total_sq / num_phase_samples - mean * mean, 0.0)
        values[idx] = mean
        ses[idx] = math.sqrt(var_est / num_phase_samples)
    return _finish_report(b, values, target, rel_tol, ses=ses)


@dataclass(frozen=True)
class ConditionalLimitReports:
    """Limit sweeps for a discrete joint (U, X) observed through two channels.

    marginal: B*I(U;Y1) against (var[c1^H X] - E var[c1^H X|U]) / N0
    conditional: B*I(X;Y2|U) against E var[c2^H X|U] / N0
    total: B*I(X;Y1) against var[c1^H X] / N0

    With c1 == c2 the chain rule makes total = marginal + conditional at
    every bandwidth, which is the cross-check the three reports exist for.
    """

    marginal: LimitCheckReport
    conditional: LimitCheckReport
    total: LimitCheckReport


def _log_mixture_at(z, offsets, log_w, sigma_sq):
    """log sum_j w_j exp(-|z + offsets_j|^2 / sigma_sq) for a batch of z."""
    expo = log_w[None, :] - (np.abs(z[:, None] + offsets[None, :]) ** 2) / sigma_sq
    peak = expo.max(axis=1)
    return peak + np.log(np.exp(expo - peak[:, None]).sum(axis=1))


def _mi_components_quadrature(s, probs, inverse, group_p, sigma_sq, order):
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    z = math.sqrt(sigma_sq) * (nodes[:, None] + 1j * nodes[None, :]).ravel()
    w2 = np.outer(weights, weights).ravel() / np.pi
    log_p = np.log(probs)
    noise_term = -(np.abs(z) ** 2) / sigma_sq

    total = 0.0
    marginal = 0.0
    conditional = 0.0
    for k in range(s.size):
        offsets = s[k] - s
        lse_all = _log_mixture_at(z, offsets, log_p, sigma_sq)
        grp = inverse == inverse[k]
        lse_grp = _log_mixture_at(
            z, offsets[grp], log_p[grp] - math.log(group_p[inverse[k]]), sigma_sq
        )
        total += probs[k] * float(w2 @ (noise_term - lse_all))
        marginal += probs[k] * float(w2 @ (lse_grp - lse_all))
        conditional += probs[k] * float(w2 @ (noise_term - lse_grp))
    return total, marginal, conditional, None


def _mi_components_monte_carlo(s, probs, inverse, group_p, sigma_sq, n, rng):
    scale = math.sqrt(sigma_sq / 2.0)
    total = 0.0
    marginal = 0.0
    conditional = 0.0
    var_tot = 0.0
    var_marg = 0.0
    var_cond = 0.0
    for k in range(s.size):
        z = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        noise_term = -(np.abs(z) ** 2) / sigma_sq
        offsets = s[k] - s
        lse_all = _log_mixture_at(z, offsets, np.log(probs), sigma_sq)
        grp = inverse == inverse[k]
        lse_grp = _log_mixture_at(
            z, offsets[grp], np.log(probs[grp]) - math.log(group_p[inverse[k]]), sigma_sq
        )
        f_tot = noise_term - lse_all
        f_marg = lse_grp - lse_all
        f_cond = noise_term - lse_grp
        total += probs[k] * float(f_tot.mean())
        marginal += probs[k] * float(f_marg.mean())
        conditional += probs[k] * float(f_cond.mean())
        var_tot += probs[k] ** 2 * float(f_tot.var()) / n
        var_marg += probs[k] ** 2 * float(f_marg.var()) / n
        var_cond += probs[k] ** 2 * float(f_cond.var()) / n
    ses = (math.sqrt(var_tot), math.sqrt(var_marg), math.sqrt(var_cond))
    return total, marginal, conditional, ses


def _weighted_variance(values, probs) -> float:
    mean = probs @ values
    dev = values - mean
    return float(np.real(probs @ (dev * dev.conj())))


def check_conditional_limits(
    joint: FiniteJoint,
    c1,
    c2,
    noise_psd: float,
    bandwidths=DEFAULT_BANDWIDTHS,
    *,
    quad_order: int = 40,
    max_quadrature_support: int = 16,
    mc_samples: int = 100_000,
    rng_seed: int = 0,
    rel_tol: float = 1e-3,
) -> ConditionalLimitReports:
    """Verify the conditional wideband limits for a finite joint (U, X).

    X are the vector atoms of the joint, U its labels. Mutual informations
    are computed exactly (2-D Gauss-Hermite products) when the support has at
    most max_quadrature_support atoms, by seeded Monte Carlo otherwise.
    """
    if not isinstance(joint, FiniteJoint):
        raise ValueError("joint must be a FiniteJoint")
    c1 = np.asarray(c1, dtype=complex).reshape(-1)
    c2 = np.asarray(c2, dtype=complex).reshape(-1)
    if c1.size != joint.dim or c2.size != joint.dim:
        raise ValueError(
            f"gain vectors must match the joint dimension {joint.dim}, "
            f"got {c1.size} and {c2.size}"
        )
    if noise_psd <= 0 or not math.isfinite(noise_psd):
        raise ValueError(f"noise_psd must be finite and positive, got {noise_psd}")
    b = _validate_bandwidths(bandwidths)

    keep = joint.probs > 0.0
    x = joint.x[keep]
    y = joint.y[keep]
    probs = joint.probs[keep]
    _, inverse = np.unique(y, return_inverse=True)
    group_p = np.bincount(inverse, weights=probs)

    s1 = x @ c1.conj()
    s2 = x @ c2.conj()

    def cond_var(s):
        acc = 0.0
        for g in range(group_p.size):
            member = inverse == g
            acc += group_p[g] * _weighted_variance(s[member], probs[member] / group_p[g])
        return acc

    var1 = _weighted_variance(s1, probs)
    target_total = var1 / noise_psd
    target_marginal = (var1 - cond_var(s1)) / noise_psd
    target_conditional = cond_var(s2) / noise_psd

    use_mc = probs.size > max_quadrature_support
    streams = np.random.SeedSequence(rng_seed).spawn(b.size)

    vals = {"total": [], "marginal": [], "conditional": []}
    ses = {"total": [], "marginal": [], "conditional": []} if use_mc else None
    for idx, bk in enumerate(b):
        sigma_sq = noise_psd * bk
        if use_mc:
            rng = np.random.default_rng(streams[idx])
            tot1, marg1, _, se1 = _mi_components_monte_carlo(
                s1, probs, inverse, group_p, sigma_sq, mc_samples, rng
            )
            _, _, cond2, se2 = _mi_components_monte_carlo(
                s2, probs, inverse, group_p, sigma_sq, mc_samples, rng
            )
        else:
            tot1, marg1, _, se1 = _mi_components_quadrature(
                s1, probs, inverse, group_p, sigma_sq, quad_order
            )
            _, _, cond2, se2 = _mi_components_quadrature(
                s2, probs, inverse, group_p, sigma_sq, quad_order
            )
        vals["total"].append(bk * tot1)
        vals["marginal"].append(bk * marg1)
        vals["conditional"].append(bk * cond2)
        if use_mc:
            ses["total"].append(bk * se1[0])
            ses["marginal"].append(bk * se1[1])
            ses["conditional"].append(bk * se2[2])

    def report(name, target):
        return _finish_report(
            b, vals[name], target, rel_tol, ses=None if ses is None else ses[name]
        )

    return ConditionalLimitReports(
        marginal=report("marginal", target_marginal),
        conditional=report("conditional", target_conditional),
        total=report("total", target_total),
    )
