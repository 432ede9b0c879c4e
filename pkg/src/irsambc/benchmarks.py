"""Full-CSI baselines: ZF and eigenvector combiners, with and without IRS.

The with-IRS baselines maximize the true GRCD over unit-modulus reflection
patterns by coordinate ascent. Each single-reflector update is a line search
over the phase circle using closed forms: with every other reflector frozen,
the composite channels are linear (h_A) and quadratic (h_AI) polynomials in
the one free coefficient z, so the Gram quantities entering the GRCD are
cheap trigonometric polynomials in z and a whole grid of candidate phases is
evaluated at once. The combiner is implied by the rule (ZF or eigenvector)
at every candidate, which keeps the objective the actually-achieved GRCD
rather than the GRCD under a stale combiner.
"""
import time
from dataclasses import dataclass

import numpy as np

from .detection import eigen_combiner, ideal_covariances
from .errors import DegenerateGeometryError, InvalidInputError
from .signal_model import ber_from_grcd, composite_channels, true_grcd

METHOD_ZF = "zf"
METHOD_EIG = "eig"
METHOD_ZF_IRS = "zf-irs"
METHOD_EIG_IRS = "eig-irs"
BENCHMARK_METHODS = (METHOD_ZF, METHOD_EIG, METHOD_ZF_IRS, METHOD_EIG_IRS)

PARALLEL_TOL = 1e-12


@dataclass
class BenchmarkResult:
    """One baseline on one realization. theta is None for the no-IRS pair."""

    method: str
    grcd: float
    ber: float
    combiner: np.ndarray = None
    theta: np.ndarray = None
    seconds: float = 0.0


def zf_combiner(comp):
    """Combiner orthogonal to h_A maximizing the information power.

    The maximizer within the orthogonal complement is the normalized
    projection of h_I onto it, which forces mu0 = P_w exactly.
    """
    h_a = comp.h_a
    h_i = comp.h_i
    if h_a.shape[0] < 2:
        raise DegenerateGeometryError("zero-forcing needs at least two antennas")
    aa = float(np.vdot(h_a, h_a).real)
    if aa <= 0.0:
        raise DegenerateGeometryError("cannot zero-force a zero ambient channel")
    proj = h_i - h_a * (np.vdot(h_a, h_i) / aa)
    norm = np.linalg.norm(proj)
    scale = max(np.linalg.norm(h_i), np.sqrt(aa))
    if norm <= PARALLEL_TOL * scale:
        raise DegenerateGeometryError("information channel is parallel to the ambient channel")
    return proj / norm


def full_csi_eigen_combiner(comp, params):
    """Eigenvector combiner from the exact covariances of both hypotheses."""
    c0, c1 = ideal_covariances(comp, params)
    return eigen_combiner(c0, c1)


def _eig_value(aa, bb, ab2, rho):
    # the two nontrivial generalized eigenvalues of the exact covariance
    # pencil solve a1*lam^2 - s*lam + b1 = 0; the achievable GRCD is the
    # larger of lam_max and 1/lam_min
    a1 = 1.0 + rho * aa
    b1 = 1.0 + rho * bb
    s = 1.0 + a1 * b1 - rho * rho * ab2
    disc = np.maximum(s * s - 4.0 * a1 * b1, 0.0)
    root = np.sqrt(disc)
    hi = (s + root) / (2.0 * a1)
    lo = np.maximum((s - root) / (2.0 * a1), 1e-300)
    return np.maximum(np.maximum(hi, 1.0 / lo), 1.0)


def _zf_value(aa, bb, ab2, rho):
    # mu0 is pinned at the noise floor, so the GRCD is 1 + rho times the
    # information power left after projecting out the ambient direction
    aa_safe = np.maximum(aa, 1e-300)
    return 1.0 + rho * np.maximum(bb - ab2 / aa_safe, 0.0)


_RULE_VALUES = {METHOD_ZF: _zf_value, METHOD_EIG: _eig_value}


def _phase_grid(points):
    return np.exp(2j * np.pi * np.arange(points) / points)


def _restart_values(h_a, h_r, f_al, rho, value_fn):
    h_ai = h_a + f_al[:, None] * h_r
    aa = np.sum(np.abs(h_a) ** 2, axis=1)
    bb = np.sum(np.abs(h_ai) ** 2, axis=1)
    ab2 = np.abs(np.sum(h_a.conj() * h_ai, axis=1)) ** 2
    return value_fn(aa, bb, ab2, rho)


def _sweep(ch, theta, h_a, h_r, f_al, alpha, rho, value_fn, grid):
    """One pass over all reflectors, updating every restart in place."""
    k = theta.shape[0]
    for n in range(ch.n):
        a1 = ch.h_si[n] * ch.h_ri[:, n]
        r1 = ch.h_ti[n] * ch.h_ri[:, n]
        t1 = alpha * np.conj(ch.h_ti[n]) * ch.h_si[n]

        cur = theta[:, n]
        a0 = h_a - cur[:, None] * a1[None, :]
        r0 = h_r - cur[:, None] * r1[None, :]
        t0 = f_al - cur * t1

        p0 = a0 + t0[:, None] * r0
        p1 = a1[None, :] + t0[:, None] * r1[None, :] + t1 * r0
        p2 = t1 * r1

        caa = np.sum(np.abs(a0) ** 2, axis=1) + np.vdot(a1, a1).real
        sa = a0.conj() @ a1
        c0 = (np.sum(np.abs(p0) ** 2, axis=1) + np.sum(np.abs(p1) ** 2, axis=1)
              + np.vdot(p2, p2).real)
        c1 = np.sum(p0.conj() * p1, axis=1) + p1.conj() @ p2
        c2 = p0.conj() @ p2
        d0 = np.sum(a0.conj() * p0, axis=1) + p1 @ a1.conj()
        d1 = np.sum(a0.conj() * p1, axis=1) + np.vdot(a1, p2)
        d2 = a0.conj() @ p2
        dm1 = p0 @ a1.conj()

        # keep the current coefficient in the candidate set so a sweep can
        # never decrease the objective
        z = np.concatenate([np.broadcast_to(grid, (k, grid.shape[0])), cur[:, None]], axis=1)
        z2 = z * z
        aa = caa[:, None] + 2.0 * (z * sa[:, None]).real
        bb = c0[:, None] + 2.0 * (z * c1[:, None] + z2 * c2[:, None]).real
        ab = d0[:, None] + d1[:, None] * z + d2[:, None] * z2 + dm1[:, None] * z.conj()
        values = value_fn(aa, bb, np.abs(ab) ** 2, rho)

        pick = np.argmax(values, axis=1)
        rows = np.arange(k)
        best = z[rows, pick]
        theta[:, n] = best
        h_a = a0 + best[:, None] * a1[None, :]
        h_r = r0 + best[:, None] * r1[None, :]
        f_al = t0 + best * t1
    return theta, h_a, h_r, f_al


def _ascend(ch, params, rule, theta0, iterations, grid_points=64, refine_points=512):
    """Coordinate ascent from a (restarts, N) block of starting patterns.

    Returns final patterns, their objective values, and the per-sweep value
    trace (one value per restart per sweep, non-decreasing along sweeps).
    """
    value_fn = _RULE_VALUES[rule]
    alpha = params.alpha
    rho = params.rho
    theta = np.array(theta0, dtype=complex)
    h_a = (theta * ch.h_si[None, :]) @ ch.h_ri.T + ch.h_sr[None, :]
    h_r = (theta * ch.h_ti[None, :]) @ ch.h_ri.T + ch.h_tr[None, :]
    f_al = alpha * ((theta * ch.h_si[None, :]) @ ch.h_ti.conj() + ch.h_st)

    grid = _phase_grid(grid_points)
    values = _restart_values(h_a, h_r, f_al, rho, value_fn)
    trace = [values]
    for _ in range(iterations):
        theta, h_a, h_r, f_al = _sweep(ch, theta, h_a, h_r, f_al, alpha, rho, value_fn, grid)
        new_values = _restart_values(h_a, h_r, f_al, rho, value_fn)
        trace.append(new_values)
        gain = (new_values - values) / np.maximum(values, 1.0)
        values = new_values
        if np.max(gain) < 1e-6:
            break
    fine = _phase_grid(refine_points)
    theta, h_a, h_r, f_al = _sweep(ch, theta, h_a, h_r, f_al, alpha, rho, value_fn, fine)
    values = _restart_values(h_a, h_r, f_al, rho, value_fn)
    trace.append(values)
    return theta, values, trace


def optimize_irs_full_csi(ch, params, rule, restarts, iterations, rng, seed_theta=None):
    """Best (theta, g) over multi-restart coordinate ascent under one rule.

    seed_theta, when given, joins the random restarts as an extra starting
    point (used to warm-start the eigenvector run from the zero-forcing
    solution).
    """
    if rule not in _RULE_VALUES:
        raise InvalidInputError(f"unknown combiner rule '{rule}'")
    if restarts < 1:
        raise InvalidInputError(f"need at least one restart, got {restarts}")
    starts = np.exp(2j * np.pi * rng.random((restarts, ch.n)))
    if seed_theta is not None:
        starts = np.concatenate([starts, np.asarray(seed_theta, dtype=complex)[None, :]])
    theta, values, _ = _ascend(ch, params, rule, starts, iterations)
    best = int(np.argmax(values))
    theta_best = theta[best]
    comp = composite_channels(ch, theta_best, params.alpha)
    if rule == METHOD_ZF:
        g = zf_combiner(comp)
    else:
        g = full_csi_eigen_combiner(comp, params)
    return theta_best, g


def evaluate_benchmarks(ch, params, rng, methods=BENCHMARK_METHODS,
                        restarts=4, iterations=50):
    """Run the requested baselines on one realization, in canonical order.

    Degenerate geometry (zero-forcing with parallel channels, or a single
    antenna) is recorded as GRCD 1 for that method instead of aborting the
    realization.
    """
    unknown = [m for m in methods if m not in BENCHMARK_METHODS]
    if unknown:
        raise InvalidInputError(f"unknown benchmark methods {unknown}")
    ordered = [m for m in BENCHMARK_METHODS if m in methods]
    comp_bare = composite_channels(ch, None, params.alpha)
    results = []
    zf_irs_theta = None
    for method in ordered:
        theta = None
        start = time.perf_counter()
        try:
            if method == METHOD_ZF:
                g = zf_combiner(comp_bare)
                comp = comp_bare
            elif method == METHOD_EIG:
                g = full_csi_eigen_combiner(comp_bare, params)
                comp = comp_bare
            else:
                rule = METHOD_ZF if method == METHOD_ZF_IRS else METHOD_EIG
                seed = zf_irs_theta if method == METHOD_EIG_IRS else None
                theta, g = optimize_irs_full_csi(
                    ch, params, rule, restarts, iterations, rng, seed_theta=seed)
                comp = composite_channels(ch, theta, params.alpha)
                if method == METHOD_ZF_IRS:
                    zf_irs_theta = theta
            value = true_grcd(comp, g, params)
        except DegenerateGeometryError:
            results.append(BenchmarkResult(method=method, grcd=1.0, ber=0.5,
                                           seconds=time.perf_counter() - start))
            continue
        results.append(BenchmarkResult(
            method=method, grcd=value, ber=ber_from_grcd(value, params.l_d),
            combiner=g, theta=theta, seconds=time.perf_counter() - start))
    return results
