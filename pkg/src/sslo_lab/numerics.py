"""Shared numerical kernels: cached Gauss rules, the stretched-exponential
envelope, and an in-repo Bessel J1.

Everything here is pure and safe for concurrent read-only use.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=256)
def _leggauss_cached(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights on [a, b]."""
    if n < 1:
        raise ValueError("quadrature order must be >= 1")
    x, w = _leggauss_cached(int(n))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gauss(breakpoints, n_per_piece: int):
    """Composite Gauss-Legendre rule over consecutive [b_i, b_{i+1}] pieces."""
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 1 or bp.size < 2:
        raise ValueError("need at least two breakpoints")
    xs, ws = [], []
    for a, b in zip(bp[:-1], bp[1:]):
        if b <= a:
            continue
        x, w = gauss_legendre(a, b, n_per_piece)
        xs.append(x)
        ws.append(w)
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)


@lru_cache(maxsize=64)
def _laggauss_cached(n: int):
    x, w = np.polynomial.laguerre.laggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_laguerre(n: int):
    """Gauss-Laguerre nodes/weights for integrals of the form
    int_0^inf f(t) e^{-t} dt."""
    return _laggauss_cached(int(n))


def envelope_psi(t, a: float, exponent: float = 2.0 / 3.0):
    """Stretched-exponential envelope exp(-a * |t|**exponent).

    The default exponent 2/3 is the decay profile of Fourier transforms of
    compactly supported functions with (k!)^{3/2} derivative growth; the
    generalized exponent m/(m+1) mirrors cutoffs of shape parameter m.
    """
    t = np.asarray(t, dtype=float)
    return np.exp(-a * np.abs(t) ** exponent)


def unit_ball_volume(d: int) -> float:
    """Lebesgue measure of the unit ball in R^d (kappa_d); kappa_0 = 1."""
    if d < 0:
        raise ValueError("dimension must be >= 0")
    from math import gamma, pi

    return pi ** (d / 2.0) / gamma(d / 2.0 + 1.0)


def sphere_surface_area(d: int) -> float:
    """Surface measure of the unit (d-1)-sphere in R^d: 2, 2*pi, 4*pi, ..."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    from math import gamma, pi

    return 2.0 * pi ** (d / 2.0) / gamma(d / 2.0)


# J1 is needed for the closed-form disc kernel.  Power series below the
# split point, Hankel asymptotics above; both branches are accurate to
# ~1e-11 absolute near the split (|x| = 12) and improve away from it.

_J1_SPLIT = 12.0


def _j1_series(x, nterms: int = 52):
    half = 0.5 * x
    q = half * half
    term = half.copy()
    out = term.copy()
    for k in range(1, nterms):
        term = term * (-q) / (k * (k + 1))
        out += term
    return out


def _j1_asymptotic(x, kmax: int = 12):
    mu = 4.0
    inv8x = 1.0 / (8.0 * x)
    t = np.ones_like(x)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    for k in range(1, kmax + 1):
        t = t * (mu - (2 * k - 1) ** 2) * inv8x / k
        if k % 2 == 1:
            q = q + t * (-1.0) ** ((k - 1) // 2)
        else:
            p = p + t * (-1.0) ** (k // 2)
    chi = x - 0.75 * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j1(x):
    """Bessel function of the first kind J1, vectorized, odd in x."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    ax = np.abs(x)
    out = np.empty_like(ax)
    small = ax <= _J1_SPLIT
    if np.any(small):
        out[small] = _j1_series(ax[small])
    if np.any(~small):
        out[~small] = _j1_asymptotic(ax[~small])
    out = np.where(x < 0, -out, out)
    return out[0] if scalar else out
