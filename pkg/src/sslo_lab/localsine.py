"""Dyadic window family on (0,1), bell functions, and the local sine basis.

The windows L_j = [alpha_j, alpha_{j+1}) shrink dyadically toward both
endpoints; each carries an overlap half-width eps_j used to blend adjacent
bells.  Bells multiplied by half-integer sines give an orthonormal basis of
L^2[0,1] whose Fourier transforms concentrate near +-pi(k+1/2)/delta_j with
stretched-exponential tails: |bhat_{jk}(xi)| is dominated by
A sqrt(delta_j) * sum_{s=+-1} exp(-a |delta_j xi - s pi(k+1/2)|^{2/3})
with A = 12 and a = 1/115.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cutoffs import CutoffProfile, eval_step
from .numerics import envelope_psi, gauss_legendre

# Certified Fourier-envelope constants for the default (m=2) cutoff shape.
DECAY_AMPLITUDE = 12.0
DECAY_RATE = 1.0 / 115.0

# Beyond this window index the bell overlap shrinks to within a few ulps of
# the interval endpoints 0/1 and exact transition-point arithmetic breaks.
_EXACT_J_RANGE = 48


def whitney_alpha(j: int) -> float:
    """Left endpoint of window j: 2^{j-1} for j <= 0, 1 - 2^{-j-1} above."""
    return 2.0 ** (j - 1) if j <= 0 else 1.0 - 2.0 ** (-j - 1)


def whitney_delta(j: int) -> float:
    """Window length: 2^{-(j+2)} for j >= 0, 2^{j-1} for j <= -1."""
    return 2.0 ** (-(j + 2)) if j >= 0 else 2.0 ** (j - 1)


@lru_cache(maxsize=None)
def whitney_eps(j: int) -> float:
    """Bell overlap half-width: delta/3 for j <= -1, 2*delta/3 for j >= 0.

    Computed by a recursive sweep from eps_0 = 1/6 so that the transition
    identity alpha_j + eps_j == alpha_{j+1} - eps_{j+1} holds exactly in
    floating point (Sterbenz-exact subtractions); the values stay within a
    relative 2^-10 of the closed forms for |j| <= 48.
    """
    if abs(j) > _EXACT_J_RANGE:
        d = whitney_delta(j)
        return d / 3.0 if j <= -1 else 2.0 * d / 3.0
    if j == 0:
        return 1.0 / 6.0
    if j > 0:
        return whitney_alpha(j) - (whitney_alpha(j - 1) + whitney_eps(j - 1))
    return (whitney_alpha(j + 1) - whitney_eps(j + 1)) - whitney_alpha(j)


@dataclass(frozen=True)
class WhitneyInterval:
    j: int
    alpha: float
    delta: float
    eps: float

    @property
    def right(self) -> float:
        return whitney_alpha(self.j + 1)

    @property
    def support(self) -> tuple[float, float]:
        """Support of the bell riding on this window."""
        return (self.alpha - self.eps, self.right + whitney_eps(self.j + 1))


def whitney_interval(j: int) -> WhitneyInterval:
    """Window j with exact dyadic endpoints."""
    return WhitneyInterval(j=j, alpha=whitney_alpha(j), delta=whitney_delta(j),
                           eps=whitney_eps(j))


@dataclass(frozen=True)
class LocalSineIndex:
    j: int
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("frequency index k must be >= 0")

    @property
    def sort_key(self):
        return (-whitney_delta(self.j), self.j, self.k)


def freq_center(idx: LocalSineIndex) -> float:
    """Dominant frequency pi (k+1/2) / delta_j of basis element (j, k)."""
    return math.pi * (idx.k + 0.5) / whitney_delta(idx.j)


@dataclass(frozen=True)
class BasisTruncation:
    """Finite slice of the basis: windows with delta >= delta_min and
    frequencies k <= k_max, enumerated by (-delta_j, j, k)."""

    delta_min: float = 2.0**-12
    k_max: int = 256

    def __post_init__(self):
        if not (0.0 < self.delta_min < 1.0):
            raise ValueError("delta_min must lie in (0, 1)")
        if self.k_max < 0:
            raise ValueError("k_max must be >= 0")

    def window_indices(self) -> list[int]:
        js = [j for j in range(0, 2000) if whitney_delta(j) >= self.delta_min]
        js += [j for j in range(-1, -2000, -1) if whitney_delta(j) >= self.delta_min]
        return sorted(js, key=lambda j: (-whitney_delta(j), j))

    def indices(self) -> list[LocalSineIndex]:
        return [
            LocalSineIndex(j, k)
            for j in self.window_indices()
            for k in range(self.k_max + 1)
        ]

    @property
    def size(self) -> int:
        return len(self.window_indices()) * (self.k_max + 1)


def eval_bell(j: int, x, profile: CutoffProfile, cached: bool = True):
    """Bell b_j(x): exactly 0 outside [alpha_j - eps_j, alpha_{j+1} + eps_{j+1}],
    1 on the saturated core, smooth step transitions at both ends."""
    a0 = whitney_alpha(j)
    a1 = whitney_alpha(j + 1)
    e0 = whitney_eps(j)
    e1 = whitney_eps(j + 1)
    x = np.asarray(x, dtype=float)
    up = eval_step(profile, (x - a0) / e0, cached=cached)
    down = eval_step(profile, (a1 - x) / e1, cached=cached)
    return up * down


def eval_basis(idx: LocalSineIndex, x, profile: CutoffProfile, cached: bool = True):
    """Basis element b_{jk}(x) = b_j(x) sqrt(2/delta_j) sin(pi(k+1/2)(x-alpha_j)/delta_j)."""
    a0 = whitney_alpha(idx.j)
    d = whitney_delta(idx.j)
    x = np.asarray(x, dtype=float)
    phase = math.pi * (idx.k + 0.5) * (x - a0) / d
    return eval_bell(idx.j, x, profile, cached=cached) * math.sqrt(2.0 / d) * np.sin(phase)


def _support_breakpoints(j: int) -> np.ndarray:
    lo, hi = whitney_interval(j).support
    return np.array([lo, whitney_alpha(j), whitney_alpha(j + 1), hi])


def _basis_matrix(indices, grid, profile) -> np.ndarray:
    """Rows: basis values on grid. Bells shared across equal j."""
    bells: dict[int, np.ndarray] = {}
    rows = np.empty((len(indices), len(grid)))
    for i, idx in enumerate(indices):
        if idx.j not in bells:
            bells[idx.j] = eval_bell(idx.j, grid, profile)
        d = whitney_delta(idx.j)
        phase = math.pi * (idx.k + 0.5) * (grid - whitney_alpha(idx.j)) / d
        rows[i] = bells[idx.j] * math.sqrt(2.0 / d) * np.sin(phase)
    return rows


def gram_matrix(indices, profile: CutoffProfile, quad_order: int | None = None) -> np.ndarray:
    """Gram matrix of inner products by composite Gauss-Legendre quadrature,
    split at window endpoints, quad_order nodes per piece.

    Entries for |j_a - j_b| >= 2 are exactly 0 (supports meet in a point).
    Raises if quad_order underresolves the sine oscillation.
    """
    indices = list(indices)
    if len(set(indices)) != len(indices):
        raise ValueError("indices must be distinct")
    n = len(indices)
    G = np.zeros((n, n))
    if n == 0:
        return G
    k_max = max(idx.k for idx in indices)
    if quad_order is None:
        quad_order = 4 * (k_max + 1) + 16
    if quad_order < 2 * (k_max + 1):
        raise ValueError(
            f"quad_order {quad_order} underresolves k_max={k_max}: need >= {2*(k_max+1)}"
        )

    by_j: dict[int, list[int]] = {}
    for pos, idx in enumerate(indices):
        by_j.setdefault(idx.j, []).append(pos)

    def fill(pos_a, pos_b, breaks):
        xs, ws = [], []
        for a, b in zip(breaks[:-1], breaks[1:]):
            if b > a:
                x, w = gauss_legendre(a, b, quad_order)
                xs.append(x)
                ws.append(w)
        grid = np.concatenate(xs)
        wts = np.concatenate(ws)
        Va = _basis_matrix([indices[p] for p in pos_a], grid, profile)
        if pos_b is pos_a:
            block = (Va * wts) @ Va.T
            G[np.ix_(pos_a, pos_a)] = block
        else:
            Vb = _basis_matrix([indices[p] for p in pos_b], grid, profile)
            block = (Va * wts) @ Vb.T
            G[np.ix_(pos_a, pos_b)] = block
            G[np.ix_(pos_b, pos_a)] = block.T

    for j, pos in by_j.items():
        fill(pos, pos, _support_breakpoints(j))
        if j + 1 in by_j:
            a1 = whitney_alpha(j + 1)
            e1 = whitney_eps(j + 1)
            fill(pos, by_j[j + 1], np.array([a1 - e1, a1, a1 + e1]))
    return G


def gram_deviation(G: np.ndarray) -> float:
    """max |G - I|; 0.0 for the empty matrix."""
    if G.size == 0:
        return 0.0
    return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def _oscillatory_nodes(j: int, k: int, max_abs_xi: float):
    """Composite rule over the bell support, resolved for the combined
    oscillation of the sine factor and the Fourier phase."""
    breaks = _support_breakpoints(j)
    omega = max_abs_xi + math.pi * (k + 1.0) / whitney_delta(j)
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        n = int(0.75 * omega * (b - a)) + 24
        x, w = gauss_legendre(a, b, n)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def fourier_transform(idx: LocalSineIndex, xi, profile: CutoffProfile):
    """bhat_{jk}(xi) = integral of b_{jk}(x) exp(-i x xi) dx over the support.

    Vectorized over xi; conjugate-symmetric since b_{jk} is real.
    """
    xi_arr = np.asarray(xi, dtype=float)
    scalar = xi_arr.ndim == 0
    xi_arr = np.atleast_1d(xi_arr)
    grid, wts = _oscillatory_nodes(idx.j, idx.k, float(np.max(np.abs(xi_arr), initial=0.0)))
    vals = np.asarray(eval_basis(idx, grid, profile)) * wts
    out = np.empty(xi_arr.shape, dtype=complex)
    chunk = max(1, int(2e6 // max(len(grid), 1)))
    for s in range(0, len(xi_arr), chunk):
        block = xi_arr[s : s + chunk]
        out[s : s + chunk] = np.exp(-1j * np.outer(block, grid)) @ vals
    return out[0] if scalar else out


def fourier_envelope(idx: LocalSineIndex, xi, amplitude: float = DECAY_AMPLITUDE,
                     rate: float = DECAY_RATE, exponent: float = 2.0 / 3.0):
    """Certified dominating envelope for |bhat_{jk}(xi)|."""
    d = whitney_delta(idx.j)
    xi = np.asarray(xi, dtype=float)
    center = math.pi * (idx.k + 0.5)
    return amplitude * math.sqrt(d) * (
        envelope_psi(d * xi - center, rate, exponent)
        + envelope_psi(d * xi + center, rate, exponent)
    )


@dataclass(frozen=True)
class DecayReport:
    j: int
    k: int
    max_ratio: float
    argmax_xi: float
    records: tuple  # dicts {j, k, xi, value, bound, ratio}


def verify_fourier_decay(idx: LocalSineIndex, xi_grid, profile: CutoffProfile,
                         amplitude: float = DECAY_AMPLITUDE, rate: float = DECAY_RATE,
                         exponent: float = 2.0 / 3.0, keep_records: bool = False) -> DecayReport:
    """Check |bhat_{jk}| <= envelope pointwise on xi_grid; ratios <= 1 certify
    the decay at the tested frequencies."""
    xi_grid = np.atleast_1d(np.asarray(xi_grid, dtype=float))
    values = np.abs(fourier_transform(idx, xi_grid, profile))
    bounds = fourier_envelope(idx, xi_grid, amplitude, rate, exponent)
    ratios = values / bounds
    i_max = int(np.argmax(ratios))
    records = ()
    if keep_records:
        records = tuple(
            dict(j=idx.j, k=idx.k, xi=float(x), value=float(v), bound=float(b),
                 ratio=float(r))
            for x, v, b, r in zip(xi_grid, values, bounds, ratios)
        )
    return DecayReport(j=idx.j, k=idx.k, max_ratio=float(ratios[i_max]),
                       argmax_xi=float(xi_grid[i_max]), records=records)


def fit_envelope_rate(idx_list, profile: CutoffProfile, exponent: float,
                      amplitude: float = DECAY_AMPLITUDE, span: float = 200.0,
                      n_grid: int = 801) -> float:
    """Calibrate the envelope rate for a non-default cutoff shape: largest a
    such that amplitude*sqrt(delta)*Psi_a dominates |bhat| on a coarse grid.

    The returned rate should then be validated on an independent grid.
    """
    best = math.inf
    for idx in idx_list:
        d = whitney_delta(idx.j)
        xi = np.linspace(-span / d, span / d, n_grid)
        vals = np.abs(fourier_transform(idx, xi, profile))
        center = math.pi * (idx.k + 0.5)
        for sgn in (1.0, -1.0):
            t = np.abs(d * xi - sgn * center)
            mask = (t > 1.0) & (vals > 1e-300)
            if not np.any(mask):
                continue
            # need vals <= A sqrt(d) exp(-a t^e) pointwise; one-sided slack
            # against the nearer peak is conservative
            num = np.log(amplitude * math.sqrt(d)) - np.log(vals[mask])
            cand = np.min(num / t[mask] ** exponent)
            best = min(best, cand)
    if not (best > 0.0 and math.isfinite(best)):
        raise ValueError("no admissible envelope rate on the calibration grid")
    return 0.98 * best
