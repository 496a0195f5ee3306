"""Reference implementations that share no code with the package."""

import math

import mpmath
import numpy as np
from scipy import integrate, special


def a_quad(j, beta, delta):
    """A_j^beta(delta) by adaptive QUADPACK integration."""
    f = lambda t: math.sin(t) ** (2 * beta + j + 1) * special.iv(j, 2 * delta * math.sin(t))
    val, _ = integrate.quad(f, 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=200)
    return 2 * math.pi * val


def bessel_i_mp(nu, x):
    return float(mpmath.besseli(nu, x))


def sph_bessel_i_mp(n, z):
    return float(mpmath.sqrt(mpmath.pi / (2 * mpmath.mpf(z))) * mpmath.besseli(n + 0.5, z))


def hydro_radial_sum(n, l, r):
    """R_nl from the explicit Laguerre power sum, in mpmath."""
    with mpmath.workdps(40):
        rho = 2 * mpmath.mpf(r) / n
        k = n - l - 1
        lag = mpmath.fsum(
            (-1) ** i * mpmath.binomial(k + 2 * l + 1, k - i) * rho**i / mpmath.factorial(i)
            for i in range(k + 1)
        )
        norm = mpmath.sqrt((mpmath.mpf(2) / n) ** 3 * mpmath.factorial(k)
                           / (2 * n * mpmath.factorial(n + l)))
        return float(norm * mpmath.exp(-rho / 2) * rho**l * lag)


def ylm_scipy(l, m, theta, phi):
    return special.sph_harm_y(l, m, theta, phi)


def y_ll(l, theta, phi):
    """Closed form of Y_l^l with the Condon-Shortley phase."""
    c = (-1) ** l / (2**l * math.factorial(l)) * math.sqrt(math.factorial(2 * l + 1) / (4 * math.pi))
    return c * np.sin(theta) ** l * np.exp(1j * l * phi)


def rss_log_psi(alpha, g0, r):
    log_n = 0.5 * ((2 * alpha + 3) * math.log(2 * g0) - math.lgamma(2 * alpha + 3))
    return log_n + alpha * math.log(r) - g0 * r


def rss_moments_quad(alpha, g0, g1):
    """The seven radial moments by QUADPACK on |psi|^2 r^2."""
    peak = alpha / g0
    width = math.sqrt(alpha + 1) / g0
    hi = peak + 60 * width + 60 / g0

    def m(f):
        g = lambda r: math.exp(2 * rss_log_psi(alpha, g0, r)) * r * r * f(r) if r > 0 else 0.0
        v, _ = integrate.quad(g, 0.0, hi, points=[peak], epsabs=0.0, epsrel=1e-13, limit=400)
        return v

    norm = m(lambda r: 1.0)
    r1 = m(lambda r: r) / norm
    r2 = m(lambda r: r * r) / norm
    ri = m(lambda r: 1 / r) / norm
    ri2 = m(lambda r: 1 / r**2) / norm
    # p_r psi = -i (psi' + psi/r) with psi'/psi = alpha/r - g0 - i g1
    p1 = -g1
    # |psi' + psi/r|^2 = |psi|^2 ((alpha+1)/r - g0)^2 + g1^2 |psi|^2
    p2 = m(lambda r: ((alpha + 1) / r - g0) ** 2) / norm + g1**2
    return {
        "norm": norm,
        "r_mean": r1,
        "r_inv": ri,
        "r_sq": r2,
        "r_inv_sq": ri2,
        "p_r": p1,
        "p_r_sq": p2,
        "dr_dpr": math.sqrt((r2 - r1**2) * (p2 - p1**2)),
    }


def sss_chi(beta, delta, theta, phi):
    """Unnormalised SSS, vectorised."""
    return np.sin(theta) ** beta * np.exp(delta * np.sin(theta) * np.cos(phi) + 1j * beta * phi)


def sphere_integral(f, n_theta=200, n_phi=200):
    """Integral over the unit sphere with scipy's Gauss-Legendre nodes in cos(theta)."""
    x, w = special.roots_legendre(n_theta)
    theta = np.arccos(x)[:, None]
    phi = (2 * math.pi * np.arange(n_phi) / n_phi)[None, :]
    return np.sum(w[:, None] * f(theta, phi)) * 2 * math.pi / n_phi
