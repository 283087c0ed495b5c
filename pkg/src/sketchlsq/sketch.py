"""Randomized trigonometric sketch operators.

The operator is Omega = sqrt(m_pad/d) * S * F * D applied from the left:
D flips row signs, F is an orthogonal trigonometric transform (orthonormal
DCT-II by default, or a Walsh-Hadamard transform with zero-padding to the
next power of two), and S samples d rows uniformly with replacement.  The
scaling makes E[Omega^T Omega] the identity on the padded space; it cancels
in the preconditioned system but keeps sketched norms unbiased.

Operators are deterministic functions of (m, d, transform, seed) and can be
reconstructed from a four-field JSON descriptor.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from . import rng
from .dense import _as_matrix, condition_diagnostics
from .errors import DimensionMismatch, NotOrthonormal

DCT2 = "dct2"
WHT = "wht"
TRANSFORMS = (DCT2, WHT)


@dataclass(frozen=True)
class EmbeddingParams:
    """Inputs to the subspace-embedding sample-size bound.

    Invariants checked at construction: m >= n >= 1, coherence mu in
    (0, 1] and at least n/m, distortion eps in (0, 1), failure probability
    delta in (0, 1).
    """

    m: int
    n: int
    mu: float
    eps: float
    delta: float

    def __post_init__(self):
        if self.n < 1 or self.m < self.n:
            raise ValueError(f"need m >= n >= 1, got m={self.m}, n={self.n}")
        if not 0 < self.mu <= 1:
            raise ValueError(f"coherence must be in (0, 1], got {self.mu}")
        if self.mu * self.m < self.n * (1 - 1e-12):
            raise ValueError(
                f"coherence {self.mu} below the floor n/m = {self.n / self.m}")
        if not 0 < self.eps < 1:
            raise ValueError(f"distortion must be in (0, 1), got {self.eps}")
        if not 0 < self.delta < 1:
            raise ValueError(
                f"failure probability must be in (0, 1), got {self.delta}")


@dataclass(frozen=True)
class SketchOperator:
    """A realized sketch: sign flips, transform choice, and sampled rows.

    signs has length m_pad (the padded height for wht, m for dct2);
    sampled_rows holds d indices into the padded transform output, drawn
    uniformly with replacement.
    """

    m: int
    d: int
    transform: str
    seed: int
    signs: np.ndarray
    sampled_rows: np.ndarray

    @property
    def m_pad(self):
        return self.signs.shape[0]

    def descriptor(self):
        """JSON-ready dict from which make_sketch rebuilds this operator."""
        return {"m": self.m, "d": self.d, "transform": self.transform,
                "seed": self.seed}


def _next_pow2(m):
    return 1 << max(m - 1, 0).bit_length() if m > 1 else 1


def make_sketch(m, d, transform=DCT2, seed=0):
    """Draw a sketch operator for m-row inputs with d output rows.

    Signs and row indices come from two independent lanes of a counter
    based generator keyed by seed, so equal arguments give bitwise equal
    operators.

    Raises
    ------
    ValueError
        If m < 1, d < 1, d exceeds the (padded) height, or the transform
        name is unknown.
    """
    if transform not in TRANSFORMS:
        raise ValueError(f"unknown transform {transform!r}, expected {TRANSFORMS}")
    if m < 1 or d < 1:
        raise ValueError(f"need m >= 1 and d >= 1, got m={m}, d={d}")
    m_pad = _next_pow2(m) if transform == WHT else m
    if d > m_pad:
        raise ValueError(f"sample count d={d} exceeds padded height {m_pad}")
    signs = rng.stream(seed, rng.LANE_SKETCH_SIGNS).integers(0, 2, m_pad) * 2.0 - 1.0
    rows = rng.stream(seed, rng.LANE_SKETCH_ROWS).integers(0, m_pad, d)
    return SketchOperator(m=int(m), d=int(d), transform=transform,
                          seed=int(seed), signs=signs, sampled_rows=rows)


def sketch_from_descriptor(desc):
    """Rebuild a SketchOperator from its four-field descriptor dict."""
    return make_sketch(int(desc["m"]), int(desc["d"]), desc["transform"],
                       int(desc["seed"]))


def _wht_inplace(x):
    # Iterative radix-2 butterflies; every add/sub is one rounded
    # elementwise operation in the dtype of x, then one normalizing
    # multiply, so float16 input is per-operation float16 throughout.
    n = x.shape[0]
    h = 1
    while h < n:
        blocks = x.reshape(-1, 2, h, *x.shape[1:])
        top = blocks[:, 0].copy()
        bot = blocks[:, 1].copy()
        blocks[:, 0] = top + bot
        blocks[:, 1] = top - bot
        h *= 2
    x *= x.dtype.type(1.0 / math.sqrt(n))
    return x


def apply_sketch(op, a):
    """Apply the sketch to a, returning the d x n sketched matrix.

    All arithmetic happens in the dtype of a, with one exception: the
    DCT-II of float16 input is computed in float32 and rounded back to
    float16 (no per-operation half-precision DCT is available), while the
    Walsh-Hadamard path is per-operation float16 end to end.

    Raises
    ------
    DimensionMismatch
        If a does not have exactly op.m rows.
    """
    a = _as_matrix(a)
    if a.shape[0] != op.m:
        raise DimensionMismatch(f"operator built for {op.m} rows, got {a.shape[0]}")
    dtype = a.dtype
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        if op.m_pad == op.m:
            work = a * op.signs[:, None].astype(dtype)
        else:
            work = np.zeros((op.m_pad, a.shape[1]), dtype=dtype)
            work[:op.m] = a * op.signs[:op.m, None].astype(dtype)
        if op.transform == WHT:
            work = _wht_inplace(work)
        elif dtype == np.float16:
            work = dct(work.astype(np.float32), type=2, axis=0,
                       norm="ortho").astype(np.float16)
        else:
            work = dct(work, type=2, axis=0, norm="ortho")
        scale = dtype.type(math.sqrt(op.m_pad / op.d))
        return work[op.sampled_rows] * scale


def sample_size_lower_bound(params):
    """Smallest sample count certified by the coherence-based tail bound.

    Returns ceil(2 m mu (1 + eps/3) ln(n/delta) / eps^2).
    """
    raw = (2.0 * params.m * params.mu * (1.0 + params.eps / 3.0)
           * math.log(params.n / params.delta) / params.eps ** 2)
    return int(math.ceil(raw))


def coherence(q):
    """Largest squared row norm of a matrix with orthonormal columns.

    Raises
    ------
    NotOrthonormal
        If norm(q^T q - I, 2) exceeds 1e-10.
    """
    q = _as_matrix(q, "q")
    n = q.shape[1]
    dev = q.T @ q - np.eye(n)
    if condition_diagnostics(dev).two_norm > 1e-10:
        raise NotOrthonormal("columns are not orthonormal to 1e-10")
    return float(np.einsum("ij,ij->i", q, q).max())
