"""Two-party minimum-uncertainty family parametrized by xi in (0, 1).

Closed forms for the expectation functional and the uncertainty product,
the radial profile with two independent evaluation routes, the position
wave function, overlaps between family members, and the number-basis
coefficient layer with its exact combinatorial identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import integrate_2d, integrate_finite_vector, integrate_semi_infinite
from .specfun import Tolerance, binom, central_binomial, ellip_e, ellip_k, log_bessel_i0

__all__ = [
    "XiParameter",
    "RadialProfile",
    "UncertaintyReport",
    "SEPARABLE_BOUND_2",
    "PRODUCT_INFIMUM_2",
    "coeff",
    "r_closed",
    "uncertainty_product",
    "residual_norm_sq",
    "f_profile",
    "wavefunction",
    "overlap",
    "fock_coeff",
    "fock_normalization_defect",
    "shell_sum",
    "shell_identity_check",
]

SEPARABLE_BOUND_2 = 0.25
PRODUCT_INFIMUM_2 = 0.125

_THETA_TOL = Tolerance(abs_tol=1e-13, rel_tol=5e-13)
# seed the angular quadrature with a uniform pre-split; the integrand is
# smooth in theta but localizes near theta = 0 once r is large
_THETA_SEGMENTS = 8


@dataclass(frozen=True)
class XiParameter:
    """Family parameter, strictly inside (0, 1)."""

    value: float

    def __post_init__(self):
        v = self.value
        if not (isinstance(v, float) and math.isfinite(v) and 0.0 < v < 1.0):
            raise ValueError(f"xi must be a finite real strictly in (0, 1), got {v!r}")


def as_xi(xi) -> XiParameter:
    if isinstance(xi, XiParameter):
        return xi
    return XiParameter(float(xi))


@dataclass(frozen=True)
class UncertaintyReport:
    """One evaluated uncertainty product with its bounds.

    ``separable_bound`` is the threshold every separable state obeys,
    ``infimum`` the unreachable lower limit of the construction, and
    ``violation_ratio`` = separable_bound / product measures how strongly
    the bound is beaten.
    """

    parties: int
    xi: XiParameter
    product: float
    separable_bound: float
    infimum: float
    violation_ratio: float
    route: str

    def __post_init__(self):
        if self.parties % 2 != 0 or self.parties < 2:
            raise ValueError(f"parties must be a positive even integer, got {self.parties}")
        if not self.product > self.infimum:
            raise ValueError(
                f"product {self.product!r} at or below the infimum {self.infimum!r}"
            )
        # The two-party product provably stays under the separable bound;
        # the larger families exceed it at small xi, so no upper check there.
        if self.parties == 2 and not self.product < self.separable_bound:
            raise ValueError(
                f"two-party product {self.product!r} must stay below {self.separable_bound!r}"
            )
        expected = self.separable_bound / self.product
        if abs(self.violation_ratio - expected) > 1e-12 * abs(expected):
            raise ValueError("violation_ratio inconsistent with separable_bound / product")


def _angular_kernel_integral(xi: float, r, kernel, tol: Tolerance = _THETA_TOL):
    """Integrate w(theta) * kernel(gamma(theta) * r) over theta in [0, pi].

    w(theta) = 1 / (sqrt(2 pi K) (1 + sqrt(xi) cos theta)) and
    gamma(theta) = (1 - sqrt(xi) cos theta) / (2 (1 + sqrt(xi) cos theta)).
    ``kernel`` receives the full matrix x[i, j] = gamma(theta_i) * r[j].
    Returns one value per r.
    """
    rv = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(rv < 0.0):
        raise ValueError("r must be nonnegative")
    sq = math.sqrt(xi)
    wnorm = 1.0 / math.sqrt(2.0 * math.pi * ellip_k(xi))

    def fv(theta):
        c = sq * np.cos(theta)
        gam = 0.5 * (1.0 - c) / (1.0 + c)
        w = wnorm / (1.0 + c)
        return w[:, None] * kernel(np.outer(gam, rv))

    values, _ = integrate_finite_vector(fv, 0.0, math.pi, tol, segments=_THETA_SEGMENTS)
    return values


def _poly_exp_envelope(k: int) -> float:
    # sup over x >= 0 of x^k e^{-x/2}
    if k == 0:
        return 1.0
    return (2.0 * k / math.e) ** k


class RadialProfile:
    """Unit-norm radial profile of the two-party family.

    ``value`` follows the configured route: "closed_form" combines the
    modified-Bessel factor with the exponential in log space (stable up
    to xi very close to 1), "angular_integral" runs the adaptive theta
    quadrature.  Derivative combinations r^k f^(k) always go through the
    angular representation, where each d/dr inserts a factor -gamma.
    """

    def __init__(self, xi, route: str = "closed_form"):
        if route not in ("closed_form", "angular_integral"):
            raise ValueError(f"unknown route {route!r}")
        self.xi = as_xi(xi)
        self.route = route
        self.family_n = 1
        self.max_derivative_order = 3
        v = self.xi.value
        self._sqrt_xi = math.sqrt(v)
        self._K = ellip_k(v)
        # exponent and Bessel-argument rates of the closed form
        self._alpha = 0.5 * (1.0 + v) / (1.0 - v)
        self._beta = self._sqrt_xi / (1.0 - v)
        self._log_front = 0.5 * (math.log(math.pi) - math.log(2.0 * self._K * (1.0 - v)))
        # gamma(0), the slowest angular decay; squared combinations of
        # r^k f^(k) admit the envelope C * e^{-decay_rate * r}
        self.decay_rate = 0.5 * (1.0 - self._sqrt_xi) / (1.0 + self._sqrt_xi)
        self._weight_mass_bound = (
            math.pi / (math.sqrt(2.0 * math.pi * self._K) * (1.0 - self._sqrt_xi))
        )

    def value(self, r):
        if self.route == "closed_form":
            return self._closed_value(r)
        return self.derivative_combo((1.0,), r)

    def _closed_value(self, r):
        rv = np.asarray(r, dtype=float)
        if np.any(rv < 0.0):
            raise ValueError("r must be nonnegative")
        out = np.exp(self._log_front + log_bessel_i0(self._beta * rv) - self._alpha * rv)
        return float(out) if rv.ndim == 0 else out

    def rk_derivative(self, k: int, r):
        """r^k times the k-th derivative of f, via the angular route."""
        if not (isinstance(k, int) and 0 <= k <= self.max_derivative_order):
            raise ValueError(f"derivative order must be an integer in [0, 3], got {k!r}")
        coefs = [0.0] * k + [1.0]
        return self.derivative_combo(coefs, r)

    def derivative_combo(self, coefs, r):
        """Evaluate sum_k coefs[k] * r^k f^(k)(r) in one angular pass."""
        if len(coefs) > self.max_derivative_order + 1:
            raise ValueError("combination exceeds the supported derivative order")
        terms = [(k, float(c)) for k, c in enumerate(coefs) if c != 0.0]

        def kernel(x):
            e = np.exp(-x)
            acc = np.zeros_like(x)
            for k, c in terms:
                acc += c * (-x) ** k
            return acc * e

        values = _angular_kernel_integral(self.xi.value, r, kernel)
        return float(values[0]) if np.ndim(r) == 0 else values

    def f_prime_at_zero(self) -> float:
        v = self.xi.value
        return -math.sqrt(math.pi / (8.0 * self._K)) * (1.0 + v) / (1.0 - v) ** 1.5

    def squared_combo_envelope(self, coefs):
        """(C, lam) with |sum coefs[k] r^k f^(k)|^2 <= C e^{-lam r} for all r."""
        amp = self._weight_mass_bound * sum(
            abs(float(c)) * _poly_exp_envelope(k) for k, c in enumerate(coefs)
        )
        return amp * amp, self.decay_rate

    def l2_norm_sq(self, tol: Tolerance = Tolerance(abs_tol=1e-10)) -> float:
        coeff_, rate = self.squared_combo_envelope((1.0,))

        def integrand(r):
            return np.asarray(self.value(r)) ** 2

        return integrate_semi_infinite(integrand, tol, rate, coeff_).value


def coeff(n: int, xi) -> float:
    """Series coefficient c_n of the two-party family."""
    if not (isinstance(n, int) and n >= 0):
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    v = as_xi(xi).value
    c0 = math.sqrt(math.pi / (2.0 * ellip_k(v)))
    if n == 0:
        return c0
    return c0 * central_binomial(n) * (v / 4.0) ** n


def r_closed(xi) -> float:
    """Closed form of the expectation functional R; negative on (0, 1)."""
    v = as_xi(xi).value
    return -1.0 / (1.0 + v) + ellip_e(v) / ((1.0 + v) ** 2 * ellip_k(v))


def uncertainty_product(xi, route: str = "closed_form") -> UncertaintyReport:
    """Two-party uncertainty product, by closed form or by 2-D quadrature.

    The quadrature route evaluates the double angular integral
    (1/(8 pi K)) iint (1 - xi cos^2 t)(1 - xi cos^2 t') /
    (1 - xi cos t cos t')^3 dt dt' over [0, pi]^2.
    """
    p = as_xi(xi)
    v = p.value
    if route == "closed_form":
        product = 0.25 + 0.25 * r_closed(v)
    elif route == "quadrature":
        kv = ellip_k(v)

        def integrand(t, tp):
            ct = np.cos(t)
            cp = math.cos(tp)
            return (1.0 - v * ct * ct) * (1.0 - v * cp * cp) / (1.0 - v * ct * cp) ** 3

        res = integrate_2d(integrand, (0.0, math.pi), (0.0, math.pi), Tolerance(abs_tol=1e-9))
        product = res.value / (8.0 * math.pi * kv)
    else:
        raise ValueError(f"unknown route {route!r}")
    return UncertaintyReport(
        parties=2,
        xi=p,
        product=product,
        separable_bound=SEPARABLE_BOUND_2,
        infimum=PRODUCT_INFIMUM_2,
        violation_ratio=SEPARABLE_BOUND_2 / product,
        route=route,
    )


def residual_norm_sq(xi) -> float:
    """Squared norm of r f' + f/2; tends to 0 as xi approaches 1."""
    v = as_xi(xi).value
    kv = ellip_k(v)
    return (2.0 * ellip_e(v) - (1.0 - v * v) * kv) / (4.0 * (1.0 + v) ** 2 * kv)


def f_profile(xi, route: str = "closed_form") -> RadialProfile:
    return RadialProfile(xi, route)


def wavefunction(x, y, xi):
    """Position wave function psi(x, y) = f(x^2 + y^2) / sqrt(pi)."""
    profile = RadialProfile(xi, "closed_form")
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    s = xv * xv + yv * yv
    out = np.asarray(profile.value(s)) / math.sqrt(math.pi)
    return float(out) if out.ndim == 0 else out


def _xi_or_zero(v) -> float:
    if isinstance(v, XiParameter):
        return v.value
    v = float(v)
    if v == 0.0:
        return 0.0
    return XiParameter(v).value


def overlap(xi, xi_prime) -> float:
    """State overlap between two family members; symmetric, in (0, 1].

    Either argument may be exactly 0, meaning the two-mode vacuum.
    """
    a = _xi_or_zero(xi)
    b = _xi_or_zero(xi_prime)
    return ellip_k(math.sqrt(a * b)) / math.sqrt(ellip_k(a) * ellip_k(b))


def fock_coeff(n: int, m: int, xi) -> float:
    """Number-basis coefficient at (n, m).

    Nonzero only when n and m are both multiples of 4 or both twice an
    odd number, i.e. (n mod 4, m mod 4) in {(0, 0), (2, 2)}.
    """
    for label, val in (("n", n), ("m", m)):
        if not (isinstance(val, int) and val >= 0):
            raise ValueError(f"{label} must be a nonnegative integer, got {val!r}")
    v = as_xi(xi).value
    if (n % 4, m % 4) not in ((0, 0), (2, 2)):
        return 0.0
    q = (n + m) // 2
    c0 = math.sqrt(math.pi / (2.0 * ellip_k(v)))
    inner = binom(n, n // 2) * binom(m, m // 2)
    return c0 * math.sqrt(inner) * binom(q, q // 2) * (v / 16.0) ** (q // 2)


def shell_sum(big_n: int, xi) -> float:
    """Total squared coefficient mass on the shell n + m = 4N."""
    if not (isinstance(big_n, int) and big_n >= 0):
        raise ValueError(f"N must be a nonnegative integer, got {big_n!r}")
    v = as_xi(xi).value
    c = binom(2 * big_n, big_n)
    return math.pi / (2.0 * ellip_k(v)) * float(c * c) * (v * v / 16.0) ** big_n


def fock_normalization_defect(xi, max_total: int) -> float:
    """1 minus the squared-coefficient mass with n + m <= max_total.

    Computed directly as the analytic tail over the remaining shells,
    which keeps full precision where the naive 1 - sum loses everything.
    """
    if not (isinstance(max_total, int) and max_total >= 4):
        raise ValueError(f"max_total must be an integer >= 4, got {max_total!r}")
    v = as_xi(xi).value
    u = v * v / 4.0
    full_shells = max_total // 4
    # term_N = binom(2N, N)^2 (xi^2/16)^N via its ratio recurrence
    term = 1.0
    for n in range(full_shells + 1):
        term *= ((2 * n + 1) / (n + 1)) ** 2 * u
    total = 0.0
    n = full_shells + 1
    while True:
        total += term
        term *= ((2 * n + 1) / (n + 1)) ** 2 * u
        n += 1
        if term < 1e-30 * total or n > 100000:
            break
    return math.pi / (2.0 * ellip_k(v)) * total


def shell_identity_check(n_max: int) -> bool:
    """Check the exact-integer shell identity S_N = 2^(4N) for N <= n_max.

    S_N is evaluated brute force as the two residue-class convolutions
    of central binomials.  Exact arithmetic throughout.
    """
    if not (isinstance(n_max, int) and n_max >= 1):
        raise ValueError(f"N_max must be an integer >= 1, got {n_max!r}")
    for big_n in range(n_max + 1):
        even = sum(
            binom(4 * k, 2 * k) * binom(4 * big_n - 4 * k, 2 * big_n - 2 * k)
            for k in range(big_n + 1)
        )
        odd = sum(
            binom(4 * k + 2, 2 * k + 1) * binom(4 * big_n - 4 * k - 2, 2 * big_n - 2 * k - 1)
            for k in range(big_n)
        )
        if even + odd != 2 ** (4 * big_n):
            return False
    return True
