"""Critical couplings and threshold classification.

The lower threshold z = 0 (at k = 0) and the upper threshold z = 27/2
(at the eight Lambda momenta) each carry a critical coupling where the
determinant vanishes exactly at the threshold:

    mu_left(gamma)  = sqrt(2 gamma  / int v^2/eps)            (gamma > 0)
    mu_right(gamma) = sqrt((9 - gamma) / int v^2/(9-eps-eps)) (gamma < 9)

At the critical coupling the threshold solution psi = (1, f1) with
f1(q) = -mu v(q) / (w1(k, q) - z0) is square-integrable iff v vanishes
at the singular point; that dichotomy (eigenvalue vs virtual level) is
decided here numerically by shell integrals of |f1|^2 against dyadic
radii, with the exact vanishing order of v as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .determinant import ModelParams
from .lattice import TorusPoint, lambda_point, threshold_point
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_threshold
from .vfunction import VFunction

__all__ = [
    "DomainError",
    "ZeroCoupling",
    "FitUnstable",
    "CriticalCouplings",
    "ThresholdReport",
    "mu_left",
    "mu_right",
    "gamma_star",
    "critical_couplings",
    "classify_threshold",
    "l2_membership_probe",
    "resonance_function_check",
    "eigenvector_residuals",
]

_MATCH_RTOL = 1e-8
_VANISH_TOL = 1e-12


class DomainError(ValueError):
    """The requested critical coupling does not exist for this gamma."""


class ZeroCoupling(ValueError):
    """The threshold integral vanishes (v is trivial), no critical coupling."""


class FitUnstable(RuntimeError):
    """The shell-integral log-log fit is too far from a power law."""


@lru_cache(maxsize=128)
def _threshold_integral_cached(v: VFunction, label: str, index, cfg: QuadratureConfig):
    if label == "origin":
        point = TorusPoint(0.0, 0.0, 0.0)
        return integrate_threshold(v, point, point, "min", cfg)
    point = lambda_point(index)
    return integrate_threshold(v, point, point, "max", cfg)


def threshold_integral(v: VFunction, which: str, cfg: QuadratureConfig | None = None):
    """Cached threshold integral for 'origin' or 'lambda:<i>' (IntegralResult)."""
    label, index, _ = threshold_point(which)
    return _threshold_integral_cached(v, label, index, cfg or DEFAULT_CONFIG)


def mu_left(gamma: float, v: VFunction, cfg: QuadratureConfig | None = None) -> float:
    """Critical coupling for the lower threshold; needs gamma > 0."""
    if not gamma > 0.0:
        raise DomainError("the lower critical coupling needs gamma > 0, got %.17g" % gamma)
    integral = threshold_integral(v, "origin", cfg).value
    if integral <= 0.0:
        raise ZeroCoupling("int v^2/eps vanishes; no lower critical coupling")
    return math.sqrt(2.0 * gamma / integral)


def mu_right(gamma: float, i: int, v: VFunction, cfg: QuadratureConfig | None = None) -> float:
    """Critical coupling for the upper threshold at the i-th Lambda point; gamma < 9."""
    if not gamma < 9.0:
        raise DomainError("the upper critical coupling needs gamma < 9, got %.17g" % gamma)
    integral = threshold_integral(v, "lambda:%d" % i, cfg).value
    if integral <= 0.0:
        raise ZeroCoupling("the upper threshold integral vanishes; no critical coupling")
    return math.sqrt((9.0 - gamma) / integral)


def gamma_star(i: int, v: VFunction, cfg: QuadratureConfig | None = None) -> float:
    """The gamma where the two critical couplings coincide: 9 I_min / (2 I_max + I_min)."""
    i_min = threshold_integral(v, "origin", cfg).value
    i_max = threshold_integral(v, "lambda:%d" % i, cfg).value
    if i_min <= 0.0 or i_max <= 0.0:
        raise ZeroCoupling("threshold integrals vanish; no coupling crossover")
    return 9.0 * i_min / (2.0 * i_max + i_min)


@dataclass(frozen=True)
class CriticalCouplings:
    """All critical data at one gamma; entries are None outside their domain."""

    gamma: float
    mu_l: float | None
    mu_r: tuple
    gamma_star: tuple


def critical_couplings(
    gamma: float, v: VFunction, cfg: QuadratureConfig | None = None
) -> CriticalCouplings:
    mu_l = mu_left(gamma, v, cfg) if gamma > 0.0 else None
    mu_r = tuple(mu_right(gamma, i, v, cfg) if gamma < 9.0 else None for i in range(1, 9))
    stars = tuple(gamma_star(i, v, cfg) for i in range(1, 9))
    return CriticalCouplings(gamma=gamma, mu_l=mu_l, mu_r=mu_r, gamma_star=stars)


# ---------------------------------------------------------------------------
# classification at a threshold
# ---------------------------------------------------------------------------


def _denominator_for(label: str, point: TorusPoint):
    """The operator denominator w1 - z0 at the threshold, with its quadratic zero."""
    if label == "origin":

        def den(qx, qy, qz):
            return 2.0 * (3.0 - np.cos(qx) - np.cos(qy) - np.cos(qz))

        return den
    k1, k2, k3 = point.coords

    def den(qx, qy, qz):
        # w1 - 27/2 = eps(k+q) + eps(q) - 9: nonpositive, quadratic zero at q = k
        return -(
            3.0
            + np.cos(k1 + qx)
            + np.cos(qx)
            + np.cos(k2 + qy)
            + np.cos(qy)
            + np.cos(k3 + qz)
            + np.cos(qz)
        )

    return den


def _critical_mu_for(params_gamma: float, label: str, index, v, cfg) -> float:
    if label == "origin":
        if not params_gamma > 0.0:
            raise DomainError("lower-threshold classification needs gamma > 0")
        return mu_left(params_gamma, v, cfg)
    if not params_gamma < 9.0:
        raise DomainError("upper-threshold classification needs gamma < 9")
    return mu_right(params_gamma, index, v, cfg)


@dataclass(frozen=True)
class ThresholdReport:
    """Outcome of classifying one threshold at given model parameters."""

    point: str
    verdict: str  # "eigenvalue" | "virtual_level" | "none"
    mu_critical: float
    v_at_point: float
    local_exponent: float
    in_l2: bool
    f0: float
    f1_samples: tuple


def l2_membership_probe(
    v: VFunction,
    params: ModelParams,
    point: str,
    cfg: QuadratureConfig | None = None,
):
    """Estimate whether f1 = -mu v / (w1 - z0) is square-integrable near the threshold.

    Integrates |f1|^2 over 11 dyadic shells with outer radii
    delta * 2^{-j} and fits the log-log slope s of shell integral against
    outer radius.  A power-law local behavior |f1| ~ r^{theta - 1} gives
    s = 2 theta - 1, so s = -1 / +1 / +3 for theta = 0 / 1 / 2; membership
    in L^2 is s > 0.1 (divergent harmonic sum exactly at s = 0).  Returns
    (local_exponent, in_l2) with local_exponent = (s + 1)/2.  Raises
    FitUnstable when the fit residual shows no clean power law.
    """
    cfg = cfg or DEFAULT_CONFIG
    label, index, pt = threshold_point(point)
    if v.is_zero:
        raise ZeroCoupling("the coupling function vanishes identically")
    den = _denominator_for(label, pt)
    t0 = pt.to_array()
    mu = params.mu

    radii = cfg.singular_ball_radius * 0.5 ** np.arange(12)
    n_r, n_mu, n_phi = 12, 16, 32
    xr, wr = np.polynomial.legendre.leggauss(n_r)
    xm, wm = np.polynomial.legendre.leggauss(n_mu)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * np.pi / n_phi)
    wphi = 2.0 * np.pi / n_phi
    st = np.sqrt(np.maximum(0.0, 1.0 - xm * xm))
    ux = st[:, None] * np.cos(phi)[None, :]
    uy = st[:, None] * np.sin(phi)[None, :]
    uz = np.broadcast_to(xm[:, None], ux.shape)

    shells = []
    for r_out, r_in in zip(radii[:-1], radii[1:]):
        r = 0.5 * (r_out - r_in) * xr + 0.5 * (r_out + r_in)
        wr_s = 0.5 * (r_out - r_in) * wr
        qx = t0[0] + r[:, None, None] * ux[None, :, :]
        qy = t0[1] + r[:, None, None] * uy[None, :, :]
        qz = t0[2] + r[:, None, None] * uz[None, :, :]
        d = np.asarray(den(qx, qy, qz), dtype=float)
        vv = np.broadcast_to(np.asarray(v.evaluate(qx, qy, qz), dtype=float), qx.shape)
        f1_sq = (mu * vv / d) ** 2
        weight = (wr_s * r * r)[:, None, None] * wm[None, :, None] * wphi
        shells.append(float(np.sum(f1_sq * weight)))

    shells = np.array(shells)
    if np.any(shells <= 0.0):
        raise FitUnstable("shell integrals are not positive; no power law to fit")
    x = np.log(radii[:-1])
    y = np.log(shells)
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((slope * x + intercept - y) ** 2)))
    if rms > 0.2:
        raise FitUnstable("log-log shell fit residual %.3g exceeds 0.2" % rms)
    local_exponent = 0.5 * (float(slope) + 1.0)
    return local_exponent, bool(slope > 0.1)


def classify_threshold(
    params: ModelParams,
    v: VFunction,
    point: str,
    cfg: QuadratureConfig | None = None,
) -> ThresholdReport:
    """Decide eigenvalue / virtual level / nothing at a threshold.

    At mu equal (to 1e-8 relative) to the matched critical coupling, the
    threshold carries an eigenvalue when v vanishes at the singular point
    and a virtual level (resonance) otherwise; away from criticality the
    verdict is "none".  The report carries the candidate solution data:
    f0 = 1 and pointwise samples of f1 = -mu v / (w1 - z0).
    """
    cfg = cfg or DEFAULT_CONFIG
    label, index, pt = threshold_point(point)
    mu_c = _critical_mu_for(params.gamma, label, index, v, cfg)
    matched = abs(params.mu - mu_c) <= _MATCH_RTOL * mu_c
    v_at = v(pt)
    local_exponent, in_l2 = l2_membership_probe(v, params, point, cfg)

    if not matched:
        verdict = "none"
    elif abs(v_at) < _VANISH_TOL:
        verdict = "eigenvalue"
    else:
        verdict = "virtual_level"

    den = _denominator_for(label, pt)
    rng = np.random.default_rng(12345)
    samples = []
    while len(samples) < 100:
        q = rng.uniform(-np.pi, np.pi, size=3)
        d = float(den(q[0], q[1], q[2]))
        if abs(d) < 1e-6:
            continue  # skip the measure-zero-ish neighborhood of the zero set
        f1 = -params.mu * v(TorusPoint(q)) / d
        samples.append((TorusPoint(q), f1))

    return ThresholdReport(
        point=point,
        verdict=verdict,
        mu_critical=mu_c,
        v_at_point=v_at,
        local_exponent=local_exponent,
        in_l2=in_l2,
        f0=1.0,
        f1_samples=tuple(samples),
    )


def resonance_function_check(
    params: ModelParams,
    v: VFunction,
    point: str,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Residual |Delta(threshold)| / scale at the given parameters.

    Zero exactly at the critical coupling: the determinant at the threshold
    is gamma - (mu^2/2) I_min at the origin and gamma - 9 + mu^2 I_max at a
    Lambda point, and this returns |1 - (mu/mu_c)^2| which equals the
    determinant value divided by its mu = 0 size.
    """
    label, index, pt = threshold_point(point)
    mu_c = _critical_mu_for(params.gamma, label, index, v, cfg)
    return abs(1.0 - (params.mu / mu_c) ** 2)


def eigenvector_residuals(
    params: ModelParams,
    v: VFunction,
    point: str,
    n_samples: int = 100,
    cfg: QuadratureConfig | None = None,
):
    """Residuals of the candidate threshold solution psi = (1, f1).

    First component: |(w0 - z0) f0 - mu int v f1| computed with the
    threshold quadrature (this is |Delta| at the threshold).  Second
    component: max over random samples of |mu v f0 + (w1 - z0) f1|, which
    vanishes identically by construction of f1; evaluated honestly.
    Returns (first_residual, second_residual_max).
    """
    cfg = cfg or DEFAULT_CONFIG
    label, index, pt = threshold_point(point)
    integral = threshold_integral(v, point, cfg).value
    if label == "origin":
        first = abs(params.gamma - 0.5 * params.mu ** 2 * integral)
    else:
        first = abs(params.gamma - 9.0 + params.mu ** 2 * integral)

    den = _denominator_for(label, pt)
    rng = np.random.default_rng(2024)
    worst = 0.0
    count = 0
    while count < n_samples:
        q = rng.uniform(-np.pi, np.pi, size=3)
        d = float(den(q[0], q[1], q[2]))
        if abs(d) < 1e-6:
            continue
        f1 = -params.mu * v(TorusPoint(q)) / d
        resid = abs(params.mu * v(TorusPoint(q)) + d * f1)
        worst = max(worst, resid)
        count += 1
    return first, worst
