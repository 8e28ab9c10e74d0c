"""Kernel density estimation under the weighted bootstrap.

Kernels are compactly supported, nonnegative, integrate to one and have
bounded variation. Each kernel carries a decomposition of ``dK`` into smooth
pieces (on which ``K'`` keeps one sign) plus point atoms at jumps, which is
what the Riemann-Stieltjes integrals below are computed against.

The bootstrapped process is ``gamma*(x) = sqrt(n h^2) (f*_{n,h}(x) - f_{n,h}(x))``.
Note the ``sqrt(n h^2)`` normalization, not the textbook ``sqrt(n h)``.
Integrating by parts,

    gamma*(x) = int K((x - s)/h) d alpha*_n(s) = int alpha*_n(x - t h) dK(t),

and the same identity defines the smoothed bridge ``int B(F(x - t h)) dK(t)``.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .empirical import as_sample, ecdf, weighted_ecdf
from .gaussian import BridgePath
from .weights import WeightVector

KERNEL_NAMES = ("epanechnikov", "triangular", "uniform", "biweight")
SMOOTH_NODES = 256
STEP_NODES = 16

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    if m not in _GL_CACHE:
        _GL_CACHE[m] = np.polynomial.legendre.leggauss(m)
    return _GL_CACHE[m]


def _nodes(lo: float, hi: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss_legendre(m)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


@dataclass(frozen=True)
class KernelSpec:
    """A density kernel with its ``dK`` decomposition.

    ``pieces`` are ``(lo, hi, dK/du)`` triples covering the support on which
    ``K`` is smooth; ``atoms`` are ``(location, jump)`` pairs, with
    ``jump = K(loc+) - K(loc-)``.
    """

    name: str
    half_width: float
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    pieces: tuple[tuple[float, float, Callable[[np.ndarray], np.ndarray]], ...] = field(repr=False)
    atoms: tuple[tuple[float, float], ...] = ()
    total_variation: float = float("nan")
    integral: float = float("nan")

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("kernel support half-width must be positive")
        integral = 0.0
        for lo, hi, _ in self.pieces:
            u, w = _nodes(lo, hi, SMOOTH_NODES)
            ku = np.asarray(self.evaluator(u), dtype=np.float64)
            if np.any(ku < 0):
                raise ValueError(f"kernel {self.name!r} takes negative values")
            integral += float(w @ ku)
        if abs(integral - 1.0) > 1e-9:
            raise ValueError(f"kernel {self.name!r} integrates to {integral!r}, not 1")
        outside = np.array([-2.0, -1.0 - 1e-9, 1.0 + 1e-9, 2.0]) * self.half_width
        if np.any(np.asarray(self.evaluator(outside)) != 0.0):
            raise ValueError(f"kernel {self.name!r} is not zero outside its support")
        tv = _tv_from_pieces(self.pieces, self.atoms)
        if math.isnan(self.total_variation):
            object.__setattr__(self, "total_variation", tv)
        elif abs(tv - self.total_variation) > 1e-9:
            raise ValueError(f"kernel {self.name!r}: stored total variation {self.total_variation} "
                             f"disagrees with its derivative pieces ({tv})")
        object.__setattr__(self, "integral", integral)

    def __call__(self, u) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(u, dtype=np.float64)), dtype=np.float64)


def _tv_from_pieces(pieces, atoms) -> float:
    tv = sum(abs(j) for _, j in atoms)
    for lo, hi, deriv in pieces:
        u, w = _nodes(lo, hi, SMOOTH_NODES)
        tv += float(w @ np.abs(deriv(u)))
    return float(tv)


def _inside(u, a):
    return np.abs(u) <= a


def _epanechnikov(u):
    return np.where(_inside(u, 1.0), 0.75 * (1.0 - u * u), 0.0)


def _triangular(u):
    return np.where(_inside(u, 1.0), 1.0 - np.abs(u), 0.0)


def _uniform(u):
    return np.where(_inside(u, 0.5), 1.0, 0.0)


def _biweight(u):
    return np.where(_inside(u, 1.0), 0.9375 * (1.0 - u * u) ** 2, 0.0)


def get_kernel(name: str = "epanechnikov") -> KernelSpec:
    """Built-in kernels. The uniform kernel lives on ``[-1/2, 1/2]``, the rest on ``[-1, 1]``."""
    if name == "epanechnikov":
        d = lambda u: -1.5 * u  # noqa: E731
        return KernelSpec(name, 1.0, _epanechnikov, ((-1.0, 0.0, d), (0.0, 1.0, d)),
                          total_variation=1.5)
    if name == "triangular":
        return KernelSpec(name, 1.0, _triangular,
                          ((-1.0, 0.0, np.ones_like), (0.0, 1.0, lambda u: -np.ones_like(u))),
                          total_variation=2.0)
    if name == "uniform":
        return KernelSpec(name, 0.5, _uniform, ((-0.5, 0.5, np.zeros_like),),
                          atoms=((-0.5, 1.0), (0.5, -1.0)), total_variation=2.0)
    if name == "biweight":
        d = lambda u: -3.75 * u * (1.0 - u * u)  # noqa: E731
        return KernelSpec(name, 1.0, _biweight, ((-1.0, 0.0, d), (0.0, 1.0, d)),
                          total_variation=1.875)
    raise ValueError(f"unknown kernel {name!r}; expected one of {KERNEL_NAMES}")


def kernel_total_variation(kernel: KernelSpec) -> float:
    """Total variation of ``K`` recomputed from its pieces and atoms."""
    tv = _tv_from_pieces(kernel.pieces, kernel.atoms)
    if abs(tv - kernel.total_variation) > 1e-9:
        raise ValueError(f"kernel {kernel.name!r} has inconsistent derivative pieces")
    return tv


@dataclass(frozen=True)
class BandwidthRule:
    """Either a fixed ``h`` or ``h(n) = c n^(-gamma)`` with ``0 < gamma < 1``."""

    h: float | None = None
    c: float = 1.0
    gamma: float = 0.2

    def __post_init__(self):
        if self.h is not None:
            if not self.h > 0:
                raise ValueError(f"bandwidth must be positive, got {self.h}")
        elif not (self.c > 0 and 0 < self.gamma < 1):
            raise ValueError(f"bandwidth rule needs c > 0 and 0 < gamma < 1, got c={self.c}, gamma={self.gamma}")

    def __call__(self, n: int) -> float:
        return float(self.h) if self.h is not None else float(self.c * n ** (-self.gamma))

    def to_config(self) -> dict:
        return {"h": self.h} if self.h is not None else {"c": self.c, "gamma": self.gamma}


DEFAULT_BANDWIDTH = BandwidthRule()


def _check_h(h: float) -> float:
    h = float(h)
    if not h > 0:
        raise ValueError(f"bandwidth h must be positive, got {h}")
    return h


def kernel_matrix(sorted_values: np.ndarray, kernel: KernelSpec, h: float, x_grid) -> sp.csr_matrix:
    """Sparse ``K((x_g - X_(i))/h)`` over sorted observations.

    Only the observations within ``[x - a h, x + a h]`` of each grid point are touched.
    """
    h = _check_h(h)
    x = np.asarray(x_grid, dtype=np.float64)
    span = kernel.half_width * h
    lo = np.searchsorted(sorted_values, x - span, side="left")
    hi = np.searchsorted(sorted_values, x + span, side="right")
    counts = hi - lo
    indptr = np.concatenate(([0], np.cumsum(counts)))
    cols = np.concatenate([np.arange(a, b) for a, b in zip(lo, hi)]) if x.size else np.zeros(0, int)
    rows = np.repeat(np.arange(x.size), counts)
    vals = kernel((x[rows] - sorted_values[cols]) / h)
    return sp.csr_matrix((vals, cols, indptr), shape=(x.size, sorted_values.size))


def _sorted_weights(s, weights) -> np.ndarray:
    w = weights.weights if isinstance(weights, WeightVector) else np.asarray(weights, dtype=np.float64)
    if w.shape != (s.n,):
        raise ValueError(f"weights have length {w.size}, sample has {s.n} observations")
    return w[s.perm]


def bootstrap_kde(sample, weights, kernel: KernelSpec, h: float, x_grid) -> np.ndarray:
    """``f*_{n,h}(x) = h^-1 sum_i w_i K((x - X_i)/h)``."""
    s = as_sample(sample)
    w = _sorted_weights(s, weights)
    return kernel_matrix(s.values, kernel, h, x_grid) @ w / float(h)


def kde_estimate(sample, kernel: KernelSpec, h: float, x_grid) -> np.ndarray:
    """Akaike-Parzen-Rosenblatt estimate ``(n h)^-1 sum_i K((x - X_i)/h)``."""
    s = as_sample(sample)
    return bootstrap_kde(s, np.full(s.n, 1.0 / s.n), kernel, h, x_grid)


def gamma_star(sample, weights, kernel: KernelSpec, h: float, x_grid,
               method: str = "direct") -> np.ndarray:
    """``sqrt(n h^2) (f*_{n,h} - f_{n,h})`` on ``x_grid``.

    ``method="stieltjes"`` evaluates ``int alpha*_n(x - t h) dK(t)`` instead,
    splitting each smooth piece at the jumps of the step integrand.
    """
    s = as_sample(sample)
    h = _check_h(h)
    x = np.asarray(x_grid, dtype=np.float64)
    w = _sorted_weights(s, weights)
    if method == "direct":
        return math.sqrt(s.n) * (kernel_matrix(s.values, kernel, h, x) @ (w - 1.0 / s.n))
    if method != "stieltjes":
        raise ValueError(f"unknown method {method!r}")
    f_star = weighted_ecdf(s, w[np.argsort(s.perm)])
    f_n = ecdf(s)
    root_n = math.sqrt(s.n)
    out = np.empty(x.size)
    for g, xg in enumerate(x):
        def alpha_star(t, xg=xg):
            pts = xg - t * h
            return root_n * (f_star(pts) - f_n(pts))

        out[g] = stieltjes_integral(alpha_star, kernel, breakpoints=(xg - s.distinct) / h,
                                    nodes=STEP_NODES)
    return out


def stieltjes_integral(g: Callable[[np.ndarray], np.ndarray], kernel: KernelSpec,
                       breakpoints: Sequence[float] | None = None, nodes: int = SMOOTH_NODES) -> float:
    """``int g(t) dK(t)``: Gauss-Legendre on each smooth piece plus the atoms.

    ``breakpoints`` split the pieces where ``g`` jumps; ``g`` must accept an
    increasing array of nodes.
    """
    total = 0.0
    bp = np.sort(np.asarray(breakpoints if breakpoints is not None else [], dtype=np.float64))
    for lo, hi, deriv in kernel.pieces:
        inner = bp[(bp > lo) & (bp < hi)]
        edges = np.concatenate(([lo], inner, [hi]))
        for a, b in zip(edges[:-1], edges[1:]):
            t, wq = _nodes(a, b, nodes)
            total += float(wq @ (np.asarray(g(t)) * deriv(t)))
    for loc, jump in kernel.atoms:
        total += jump * float(np.asarray(g(np.array([loc])))[0])
    return total


def _stieltjes_rule(kernel: KernelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and ``dK`` masses so that ``int g dK ~ sum mass * g(node)``."""
    ts, ms = [], []
    for lo, hi, deriv in kernel.pieces:
        t, wq = _nodes(lo, hi, SMOOTH_NODES)
        ts.append(t)
        ms.append(wq * deriv(t))
    for loc, jump in kernel.atoms:
        ts.append(np.array([loc]))
        ms.append(np.array([jump]))
    return np.concatenate(ts), np.concatenate(ms)


def smoothed_bridges(paths: np.ndarray, grid: np.ndarray, true_cdf, kernel: KernelSpec,
                     h: float, x_grid) -> np.ndarray:
    """Row-wise ``int B(F(x - t h)) dK(t)`` for a ``(reps, len(grid))`` array of paths."""
    h = _check_h(h)
    grid = np.asarray(grid, dtype=np.float64)
    if np.max(np.diff(grid)) > h / 64.0 * (1 + 1e-12):
        raise ValueError(f"bridge grid too coarse for h={h:.3g}: gaps must be <= h/64")
    x = np.asarray(x_grid, dtype=np.float64)
    t, mass = _stieltjes_rule(kernel)
    u = np.asarray(true_cdf((x[:, None] - t[None, :] * h).ravel()), dtype=np.float64)
    if np.any((u < 0) | (u > 1)):
        raise ValueError("true_cdf returned values outside [0, 1]")
    # linear interpolation weights, shared across paths
    j = np.clip(np.searchsorted(grid, u, side="right") - 1, 0, grid.size - 2)
    frac = (u - grid[j]) / (grid[j + 1] - grid[j])
    paths = np.atleast_2d(paths)
    vals = paths[:, j] * (1.0 - frac) + paths[:, j + 1] * frac
    return (vals.reshape(paths.shape[0], x.size, t.size) * mass).sum(axis=2)


def smoothed_bridge(path: BridgePath, true_cdf, kernel: KernelSpec, h: float, x_grid) -> np.ndarray:
    """``int K((x - s)/h) dB(F(s))``, computed as ``int B(F(x - t h)) dK(t)``."""
    return smoothed_bridges(path.values[None, :], path.grid, true_cdf, kernel, h, x_grid)[0]


def gamma_limit(path: BridgePath, true_cdf, kernel: KernelSpec, x_grid) -> np.ndarray:
    """``B(F(x)) int K``; pass the empirical CDF as ``true_cdf`` in estimation mode."""
    from .gaussian import compose_with_cdf

    return compose_with_cdf(path, true_cdf, x_grid) * kernel.integral


def sup_grid(sample, kernel: KernelSpec, h: float, per_bandwidth: int = 32) -> np.ndarray:
    """Uniform grid over ``[min - a h, max + a h]`` with spacing at most ``h / per_bandwidth``."""
    s = as_sample(sample)
    span = kernel.half_width * h
    lo, hi = s.values[0] - span, s.values[-1] + span
    points = max(2, int(math.ceil((hi - lo) / (h / per_bandwidth))) + 1)
    return np.linspace(lo, hi, points)


def sup_gamma_star(sample, W: np.ndarray, kernel: KernelSpec, h: float, x_grid=None) -> np.ndarray:
    """Row-wise ``sup_x |gamma*(x)|`` over ``x_grid`` for a ``(reps, n)`` weight matrix."""
    s = as_sample(sample)
    x = sup_grid(s, kernel, h) if x_grid is None else np.asarray(x_grid, dtype=np.float64)
    km = kernel_matrix(s.values, kernel, h, x)
    C = np.asarray(W, dtype=np.float64)[:, s.perm] - 1.0 / s.n
    return math.sqrt(s.n) * np.abs(km @ C.T).max(axis=0)


def modulus_envelope(n: int, h: float, density_bound: float | None = None) -> dict:
    """Rate envelope components ``log n / sqrt n`` and ``h sqrt(log 1/h)`` (plus ``M h`` if given)."""
    out = {"kmt_term": math.log(n) / math.sqrt(n), "modulus_term": h * math.sqrt(math.log(1.0 / h))}
    if density_bound is not None:
        out["density_bound"] = float(density_bound)
        out["m_h"] = float(density_bound) * h
    return out
