"""Random weight vectors for the generalized bootstrap.

Observation ``i`` receives the weight ``Z_i / T_n`` where ``Z_1, ..., Z_n`` are
i.i.d. strictly positive with ``E Z = 1`` and ``E Z^2 = 2`` and
``T_n = Z_1 + ... + Z_n``. The Efron multinomial scheme is provided for
comparison; its weights are not of that form and are tagged ``"efron"``.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

KINDS = ("exp-bayesian", "two-point", "efron", "custom-generator")

# Exact moment targets for Z.
MEAN_Z = 1.0
SECOND_MOMENT_Z = 2.0
_MOMENT_TOL = 1e-12


class WeightDrawError(ValueError):
    """A custom generator produced a non-positive draw."""


@dataclass(frozen=True)
class WeightScheme:
    """Generator for the multipliers ``Z`` (or Efron counts).

    Use the constructors :meth:`exp_bayesian`, :meth:`two_point`,
    :meth:`efron` and :meth:`custom` rather than building instances by hand.
    """

    kind: str
    a: float | None = None
    b: float | None = None
    p: float | None = None
    m: int | None = None
    sampler: Callable[[np.random.Generator, int], np.ndarray] | None = field(
        default=None, compare=False, repr=False)
    a2_declared: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight scheme kind {self.kind!r}; expected one of {KINDS}")

    @classmethod
    def exp_bayesian(cls) -> WeightScheme:
        """Z ~ Exp(1): the Bayesian bootstrap (Dirichlet(1, ..., 1) weights)."""
        return cls("exp-bayesian")

    @classmethod
    def two_point(cls, a: float, b: float) -> WeightScheme:
        """Z takes values ``a < 1 < b``; the probability of ``b`` is solved from ``E Z = 1``.

        Raises ``ValueError`` unless the resulting second moment is 2, which
        holds exactly when ``(1 - a)(b - 1) = 1``.
        """
        a = float(a)
        b = float(b)
        if not (0.0 < a < 1.0 < b):
            raise ValueError(f"two-point support must satisfy 0 < a < 1 < b, got a={a}, b={b}")
        p = (1.0 - a) / (b - a)
        mean = p * b + (1.0 - p) * a
        second = p * b * b + (1.0 - p) * a * a
        if abs(mean - MEAN_Z) > _MOMENT_TOL or abs(second - SECOND_MOMENT_Z) > _MOMENT_TOL:
            raise ValueError(
                f"two-point scheme {{{a}, {b}}} violates the moment conditions: "
                f"P(Z=b)={p:.12g} gives E(Z)={mean:.12g}, E(Z^2)={second:.12g} (need 1 and 2); "
                f"for a={a} the admissible upper point is b={1.0 + 1.0 / (1.0 - a):.12g}")
        return cls("two-point", a=a, b=b, p=p)

    @classmethod
    def efron(cls, m: int | None = None) -> WeightScheme:
        """Multinomial resampling of ``m`` draws (``m=None`` means ``m=n``)."""
        if m is not None and int(m) < 1:
            raise ValueError(f"efron resample size m must be >= 1, got {m}")
        return cls("efron", m=None if m is None else int(m))

    @classmethod
    def custom(cls, sampler: Callable[[np.random.Generator, int], np.ndarray], *,
               a2_declared: bool = False, validate: bool = True,
               sample_size: int = 100_000, seed: int = 0) -> WeightScheme:
        """Wrap ``sampler(rng, size) -> array`` of positive draws.

        With ``validate=True`` the first two moments are checked by sampling
        (see :func:`validate_scheme_moments`) and a flagged generator is
        rejected. The exponential-moment condition cannot be checked by
        sampling; pass ``a2_declared=True`` to record that the user vouches
        for it.
        """
        scheme = cls("custom-generator", sampler=sampler, a2_declared=a2_declared)
        if validate:
            from .streams import derive_substream

            report = validate_scheme_moments(scheme, sample_size, derive_substream(seed, (0,)))
            if report.verdict != "pass":
                raise ValueError(
                    f"custom generator failed moment validation: mean={report.mean:.6g} "
                    f"(se {report.se_mean:.3g}), E(Z^2)={report.second_moment:.6g} "
                    f"(se {report.se_second:.3g})")
        return scheme

    @classmethod
    def from_config(cls, spec: Mapping[str, Any]) -> WeightScheme:
        """Build from a JSON-style mapping ``{"kind": ..., "a": ..., "b": ..., "m": ...}``."""
        kind = spec.get("kind", "exp-bayesian")
        if kind == "exp-bayesian":
            return cls.exp_bayesian()
        if kind == "two-point":
            if spec.get("a") is None or spec.get("b") is None:
                raise ValueError("two-point scheme requires both 'a' and 'b'")
            return cls.two_point(spec["a"], spec["b"])
        if kind == "efron":
            return cls.efron(spec.get("m"))
        if kind == "custom-generator":
            raise ValueError("custom-generator schemes cannot be built from a config")
        raise ValueError(f"unknown weight scheme kind {kind!r}")

    def to_config(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind}
        if self.kind == "two-point":
            out.update(a=self.a, b=self.b)
        elif self.kind == "efron" and self.m is not None:
            out["m"] = self.m
        return out

    def draw_z(self, rng: np.random.Generator, size) -> np.ndarray:
        """Raw multipliers ``Z`` with the given shape (not defined for Efron)."""
        if self.kind == "exp-bayesian":
            return rng.standard_exponential(size)
        if self.kind == "two-point":
            return np.where(rng.random(size) < self.p, self.b, self.a)
        if self.kind == "custom-generator":
            shape = (size,) if np.isscalar(size) else tuple(size)
            z = np.asarray(self.sampler(rng, int(np.prod(shape))), dtype=np.float64).reshape(shape)
            bad = ~(z > 0.0) | ~np.isfinite(z)
            if bad.any():
                raise WeightDrawError(
                    f"custom generator produced a non-positive or non-finite draw: {z[bad].flat[0]!r}")
            return z
        raise ValueError("efron scheme has no multiplier variable Z")


@dataclass(frozen=True)
class WeightVector:
    """Normalized bootstrap weights in the original observation order.

    ``raw`` holds the multipliers ``Z`` and ``raw_sum`` their total ``T_n``;
    both are ``None`` for Efron weights.
    """

    weights: np.ndarray
    scheme_kind: str
    raw_sum: float | None = None
    raw: np.ndarray | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty 1-d array")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 within 1e-12, got {w.sum()!r}")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size

    @classmethod
    def uniform(cls, n: int) -> WeightVector:
        """Weights ``1/n`` everywhere: the diagnostic degenerate bootstrap."""
        return cls(np.full(n, 1.0 / n), "uniform")


def draw_weight_vector(scheme: WeightScheme, n: int, stream: np.random.Generator) -> WeightVector:
    """Draw ``Z_1..Z_n`` from ``scheme`` and return ``Z_i / T_n``.

    Efron schemes are delegated to :func:`draw_efron_weights` with ``m``
    defaulting to ``n``.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if scheme.kind == "efron":
        return draw_efron_weights(n, scheme.m or n, stream)
    z = scheme.draw_z(stream, n)
    t = float(z.sum())
    return WeightVector(z / t, scheme.kind, raw_sum=t, raw=z)


def draw_efron_weights(n: int, m: int, stream: np.random.Generator) -> WeightVector:
    """Multinomial counts ``(m_1..m_n)`` over ``m`` uniform draws, returned as ``m_i/m``."""
    n, m = int(n), int(m)
    if n < 1 or m < 1:
        raise ValueError(f"n and m must be >= 1, got n={n}, m={m}")
    counts = stream.multinomial(m, np.full(n, 1.0 / n))
    return WeightVector(counts / m, "efron")


def draw_weight_matrix(scheme: WeightScheme, n: int, reps: int,
                       stream: np.random.Generator) -> np.ndarray:
    """``reps`` independent weight vectors as the rows of a C-contiguous array.

    Row ``j`` equals what :func:`draw_weight_vector` would return for the
    ``j``-th consecutive call on the same stream, for the Z-based schemes.
    """
    if scheme.kind == "efron":
        m = scheme.m or n
        counts = stream.multinomial(m, np.full(n, 1.0 / n), size=reps)
        return np.ascontiguousarray(counts / m)
    z = scheme.draw_z(stream, (reps, n))
    return np.ascontiguousarray(z / z.sum(axis=1, keepdims=True))


@dataclass(frozen=True)
class MomentReport:
    sample_size: int
    mean: float
    second_moment: float
    se_mean: float
    se_second: float
    verdict: str
    a2_status: str

    def as_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


def validate_scheme_moments(scheme: WeightScheme, sample_size: int,
                            stream: np.random.Generator) -> MomentReport:
    """Sample ``Z`` and compare its first two moments with 1 and 2.

    The verdict is ``"flag"`` when either sample moment is more than four
    standard errors from its target. Finiteness of the moment generating
    function near zero cannot be established from a sample; ``a2_status``
    records whether it holds by construction or is merely declared.
    """
    if sample_size < 100:
        raise ValueError(f"sample_size must be >= 100, got {sample_size}")
    if scheme.kind == "efron":
        raise ValueError("efron weights have no multiplier variable to validate")
    z = scheme.draw_z(stream, int(sample_size))
    z2 = z * z
    mean = float(z.mean())
    second = float(z2.mean())
    se_mean = float(z.std(ddof=1) / np.sqrt(sample_size))
    se_second = float(z2.std(ddof=1) / np.sqrt(sample_size))
    flag = (abs(mean - MEAN_Z) > 4.0 * se_mean) or (abs(second - SECOND_MOMENT_Z) > 4.0 * se_second)
    if scheme.kind == "exp-bayesian":
        a2 = "holds: Exp(1) has a finite MGF for |t| < 1"
    elif scheme.kind == "two-point":
        a2 = "holds: bounded support"
    elif scheme.a2_declared:
        a2 = "declared by user; not verifiable by sampling"
    else:
        a2 = "not declared; not verifiable by sampling"
    return MomentReport(int(sample_size), mean, second, se_mean, se_second,
                        "flag" if flag else "pass", a2)
