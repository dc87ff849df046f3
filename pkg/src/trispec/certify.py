"""Certified eigenvalue enclosures from an almost-Dirichlet eigenfunction.

An exact Helmholtz solution that nearly vanishes on the boundary of a
domain pins down a true Dirichlet eigenvalue: some eigenvalue lies within
a relative distance epsilon of the trial frequency, where epsilon is the
boundary sup norm over the interior L2 norm times the square root of the
area.  The trial functions here are short cosine-Bessel sums on the
circular sector matching an isosceles triangle's aperture; they vanish
exactly on the two equal sides, so only the short side contributes to the
sup norm.  Everything feeds the certified enclosure of the second
eigenvalue of the aperture-0.761 isosceles triangle that the second-tone
verification pipeline needs.
"""

import functools
import json
import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

__all__ = [
    "SectorSpec",
    "TrialFunction",
    "CertifiedInterval",
    "bessel_j",
    "bessel_zero",
    "sector_eigenvalue",
    "trial_eval",
    "l2_lower",
    "boundary_sup",
    "moler_payne",
    "certify_second_eigenvalue",
    "lemma62_verify",
]

BESSEL_MAX_ORDER = 50.0
BESSEL_MAX_ARG = 100.0
BESSEL_ZERO_MAX_K = 20
# Residual tolerance on |J_nu| at a computed zero.
ZERO_RESIDUAL_TOL = 1e-9

# The certified configuration: isosceles triangle with apex height 5/2
# over a half-base of 1, apex moved to the origin and axis along +x.
CERT_APEX = 2.5
CERT_KAPPA = 334.0 / 75.0
CERT_COEFFS = (1.0, 5.0 / 22.0, -2225.0 / 53.0)


def bessel_j(nu, x):
    """Bessel function of the first kind, validated to the supported range."""
    nu_arr = np.asarray(nu, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(nu_arr < 0) or np.any(nu_arr > BESSEL_MAX_ORDER):
        raise ValueError(f"order must lie in [0, {BESSEL_MAX_ORDER}]")
    if np.any(x_arr < 0) or np.any(x_arr > BESSEL_MAX_ARG):
        raise ValueError(f"argument must lie in [0, {BESSEL_MAX_ARG}]")
    out = jv(nu_arr, x_arr)
    return float(out) if out.ndim == 0 else out


def bessel_zero(nu, k):
    """k-th positive zero of J_nu, to near machine precision.

    Scans rightward from the order (the first zero always lies beyond it)
    in steps well below the minimal zero spacing, then polishes each sign
    change with a bracketing root finder.  Raises if the requested zero
    lies beyond the supported argument range.
    """
    if not (0 <= nu <= BESSEL_MAX_ORDER):
        raise ValueError(f"order must lie in [0, {BESSEL_MAX_ORDER}]")
    if not (1 <= k <= BESSEL_ZERO_MAX_K):
        raise ValueError(f"zero index must lie in [1, {BESSEL_ZERO_MAX_K}]")
    step = 0.25
    x = max(nu, step)
    f_prev = bessel_j(nu, x)
    found = 0
    while x + step <= BESSEL_MAX_ARG:
        x_next = x + step
        f_next = bessel_j(nu, x_next)
        if f_prev == 0.0:
            f_prev = f_next  # positive underflow near the order; keep scanning
            x = x_next
            continue
        if f_prev * f_next < 0.0:
            found += 1
            if found == k:
                root = brentq(lambda t: bessel_j(nu, t), x, x_next,
                              xtol=1e-13, rtol=8.9e-16)
                if abs(bessel_j(nu, root)) >= ZERO_RESIDUAL_TOL:
                    raise RuntimeError(
                        f"zero {k} of J_{nu} failed the residual check")
                return float(root)
        x, f_prev = x_next, f_next
    raise RuntimeError(
        f"zero {k} of J_{nu} not bracketed below x = {BESSEL_MAX_ARG}")


class SectorSpec:
    """Circular sector of given radius and aperture, axis along +x."""

    def __init__(self, radius, aperture):
        if not (radius > 0):
            raise ValueError("radius must be positive")
        if not (0 < aperture < math.pi):
            raise ValueError("aperture must lie in (0, pi)")
        self.radius = float(radius)
        self.aperture = float(aperture)

    @property
    def order(self):
        """Angular order nu = pi/aperture of the lowest Dirichlet family."""
        return math.pi / self.aperture

    def __repr__(self):
        return f"SectorSpec(radius={self.radius!r}, aperture={self.aperture!r})"


def sector_eigenvalue(s, k, j):
    """Dirichlet sector eigenvalue (j_{k nu, j} / radius)^2.

    k counts the angular family (k = 1 is even about the axis, k = 2 odd,
    and so on), j the radial overtone.
    """
    if k < 1 or j < 1:
        raise ValueError("angular family and radial index must be >= 1")
    return (bessel_zero(k * s.order, j) / s.radius) ** 2


class TrialFunction:
    """Sum of terms coeff * J_{k nu}(kappa r) cos(k nu theta), k odd.

    Each term solves the Helmholtz equation at frequency kappa, and odd k
    makes the angular factor vanish at theta = +-pi/(2 nu), so the sum is
    an exact eigenfunction candidate on the sector rays.
    """

    def __init__(self, terms, kappa):
        if not (kappa > 0):
            raise ValueError("frequency must be positive")
        packed = []
        for coeff, k, nu in terms:
            k = int(k)
            if k < 1 or k % 2 == 0:
                raise ValueError("order multiples must be odd positive integers")
            if not (nu > 1):
                raise ValueError("angular order must exceed 1")
            packed.append((float(coeff), k, float(nu)))
        if not packed:
            raise ValueError("term list must be nonempty")
        orders = {nu for _, _, nu in packed}
        if len(orders) != 1:
            raise ValueError("terms must share one base angular order")
        self.terms = tuple(packed)
        self.kappa = float(kappa)

    @property
    def order(self):
        """Common base angular order nu of the terms."""
        return self.terms[0][2]

    @property
    def aperture(self):
        return math.pi / self.order

    @property
    def frequency_squared(self):
        """The Helmholtz eigenvalue kappa^2 the sum satisfies."""
        return self.kappa ** 2

    def __repr__(self):
        return f"TrialFunction(terms={self.terms!r}, kappa={self.kappa!r})"


def trial_eval(tf, r, theta):
    """Evaluate the trial sum at polar points (broadcasts over arrays)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("radius must be nonnegative")
    th = np.asarray(theta, dtype=float)
    out = np.zeros(np.broadcast_shapes(r_arr.shape, th.shape))
    for coeff, k, nu in tf.terms:
        out = out + coeff * bessel_j(k * nu, tf.kappa * r_arr) * np.cos(k * nu * th)
    return float(out) if out.ndim == 0 else out


# Quadrature orders for the sector L2 integral; doubling both estimates
# the truncation error.
L2_QUAD_RADIAL = 80
L2_QUAD_ANGULAR = 60
L2_QUAD_RTOL = 1e-6


def _sector_l2_sq(tf, s, n_r, n_t):
    xr, wr = np.polynomial.legendre.leggauss(n_r)
    xt, wt = np.polynomial.legendre.leggauss(n_t)
    r = 0.5 * s.radius * (xr + 1.0)
    wr = 0.5 * s.radius * wr
    th = 0.5 * s.aperture * xt
    wt = 0.5 * s.aperture * wt
    vals = trial_eval(tf, r[:, None], th[None, :])
    return float(np.einsum("i,j,ij->", wr * r, wt, vals ** 2))


def l2_lower(tf, s):
    """Certified lower estimate of the L2 norm of the trial sum on a sector.

    Tensor Gauss-Legendre quadrature of the square, with the order-doubling
    difference subtracted before taking the square root, so the return value
    is safe to use as a denominator lower bound.
    """
    coarse = _sector_l2_sq(tf, s, L2_QUAD_RADIAL, L2_QUAD_ANGULAR)
    fine = _sector_l2_sq(tf, s, 2 * L2_QUAD_RADIAL, 2 * L2_QUAD_ANGULAR)
    err = abs(fine - coarse)
    if err > L2_QUAD_RTOL * fine:
        raise RuntimeError("sector quadrature did not converge")
    return math.sqrt(max(fine - err, 0.0))


# Sampling density and first-order safeguard factor for the boundary sup.
SUP_SAMPLES = 200001
SUP_SAFEGUARD = 1.5


def boundary_sup(tf, h, num=SUP_SAMPLES):
    """Safeguarded sup of |trial| along the short side r = h/cos(theta).

    The two equal sides of the triangle lie on the angular zeros, so only
    this side matters.  Dense sampling plus a finite-difference Lipschitz
    pad (spacing times 1.5x the largest sampled slope); an upper estimate,
    not a proven bound.
    """
    if not (h > 0):
        raise ValueError("apex height must be positive")
    if num < 10 ** 5:
        raise ValueError("need at least 1e5 boundary samples")
    half = 0.5 * tf.aperture
    theta = np.linspace(-half, half, num)
    vals = np.abs(trial_eval(tf, h / np.cos(theta), theta))
    spacing = theta[1] - theta[0]
    slope = float(np.max(np.abs(np.diff(vals)))) / spacing
    return float(np.max(vals)) + spacing * SUP_SAFEGUARD * slope


class CertifiedInterval:
    """Two-sided enclosure of a Dirichlet eigenvalue near a trial frequency.

    lower = lambda_bar/(1+epsilon) and upper = lambda_bar/(1-epsilon); some
    true eigenvalue of the domain lies inside.  provenance records how the
    sup and L2 bounds were obtained.
    """

    def __init__(self, lambda_bar, epsilon, provenance=None):
        if not (0.0 < epsilon < 1.0):
            raise ValueError("epsilon must lie in (0, 1)")
        if not (lambda_bar > 0):
            raise ValueError("lambda_bar must be positive")
        self.lambda_bar = float(lambda_bar)
        self.epsilon = float(epsilon)
        self.lower = self.lambda_bar / (1.0 + self.epsilon)
        self.upper = self.lambda_bar / (1.0 - self.epsilon)
        self.provenance = dict(provenance) if provenance else {}

    def __contains__(self, value):
        return self.lower <= value <= self.upper

    def to_json(self):
        out = {
            "lambda_bar": self.lambda_bar,
            "epsilon": self.epsilon,
            "lower": self.lower,
            "upper": self.upper,
            "provenance": self.provenance,
        }
        return json.dumps(out)

    def __repr__(self):
        return (f"CertifiedInterval(lambda_bar={self.lambda_bar!r}, "
                f"epsilon={self.epsilon!r})")


def moler_payne(lambda_bar, sup_bound, l2_bound, area):
    """Certified interval from the boundary-defect bound.

    epsilon = sqrt(area) * sup / l2; raises when epsilon >= 1, since then
    the defect is too large to certify anything.
    """
    if not (l2_bound > 0 and area > 0 and sup_bound >= 0):
        raise ValueError("bounds and area must be positive")
    eps = math.sqrt(area) * sup_bound / l2_bound
    if eps >= 1.0:
        raise ValueError(f"certification failed: epsilon = {eps:.3g} >= 1")
    return CertifiedInterval(lambda_bar, eps)


@functools.lru_cache(maxsize=32)
def certify_second_eigenvalue(kappa=CERT_KAPPA, coeffs=CERT_COEFFS,
                              h=CERT_APEX, num=SUP_SAMPLES):
    """Certified enclosure near kappa^2 on the aperture-2*arctan(1/h) triangle.

    The triangle has its apex at the origin, axis along +x, apex height h
    over a half-base of 1 in the original placement, so area h and short
    side r = h/cos(theta).  Returns the CertifiedInterval; the inscribed
    sector of radius h supplies the L2 lower bound.
    """
    aperture = 2.0 * math.atan(1.0 / h)
    nu = math.pi / aperture
    tf = TrialFunction([(c, 2 * i + 1, nu) for i, c in enumerate(coeffs)], kappa)
    inner = SectorSpec(h, aperture)
    l2 = l2_lower(tf, inner)
    sup = boundary_sup(tf, h, num)
    interval = moler_payne(kappa ** 2, sup, l2, h)
    interval.provenance.update({
        "l2_lower": l2,
        "boundary_sup": sup,
        "boundary_samples": int(num),
        "quadrature_orders": [L2_QUAD_RADIAL, L2_QUAD_ANGULAR],
        "area": float(h),
        "heuristic": True,
    })
    return interval


def lemma62_verify(fem_level=None):
    """Verify the certified second-tone bound for the apex-5/2 isosceles triangle.

    Chains: the enclosure must sit inside the published window, its lower
    end must clear the sum-comparison threshold, and the sector exclusion
    must rule out every rank above the second, so the enclosed eigenvalue
    forces the second tone above the threshold.  Optionally cross-checks
    that the FEM second tone falls inside the enclosure.
    """
    from .reports import combine, make_report
    from .transplant import C_funcs

    h = CERT_APEX
    interval = certify_second_eigenvalue()
    prov = interval.provenance
    checks = [
        make_report("sector L2 lower bound exceeds 0.25",
                    prov["l2_lower"], 0.25),
        make_report("short-side sup estimate below 0.0013",
                    prov["boundary_sup"], 0.0013, mode="<"),
        make_report("defect ratio epsilon below 0.009",
                    interval.epsilon, 0.009, mode="<"),
        make_report("enclosure lower end above 19.65",
                    interval.lower, 19.65),
        make_report("enclosure upper end below 20.03",
                    interval.upper, 20.03, mode="<"),
    ]
    # The enclosed eigenvalue beats the threshold that makes the two-tone
    # sum comparison close.
    threshold = C_funcs(h)[1] * 40.0 * math.pi ** 2 / 9.0 \
        - 4.0 * math.pi ** 2 / (math.sqrt(3.0) * h)
    checks.append(make_report(
        "enclosure lower end clears the sum-comparison threshold",
        interval.lower, threshold, threshold_value=threshold))
    # Exclusion: the triangle sits in the sector of radius sqrt(1+h^2), so
    # its third eigenvalue is at least the sector's, which must exceed the
    # enclosure; the enclosed eigenvalue is therefore the first or second.
    outer = SectorSpec(math.sqrt(1.0 + h * h), 2.0 * math.atan(1.0 / h))
    exclusion = sector_eigenvalue(outer, 2, 1)
    checks.append(make_report(
        "odd-family sector eigenvalue excludes ranks three and up",
        exclusion, interval.upper, exclusion_value=exclusion))
    if fem_level is not None:
        from .fem import solve_extrapolated
        from .geometry import FanTriangle
        vals, errs, _ = solve_extrapolated(FanTriangle(0.0, h).triangle,
                                           2, fem_level)
        checks.append(make_report(
            "FEM second tone above the enclosure lower end",
            float(vals[1]), interval.lower, fem_err=float(errs[1])))
        checks.append(make_report(
            "FEM second tone below the enclosure upper end",
            float(vals[1]), interval.upper, mode="<", fem_err=float(errs[1])))
    return combine(
        "certified enclosure forces the second tone of the apex-5/2 triangle "
        "above the sum-comparison threshold",
        checks,
        interval={"lambda_bar": interval.lambda_bar,
                  "epsilon": interval.epsilon,
                  "lower": interval.lower,
                  "upper": interval.upper},
        heuristic=True,
    )
