"""Dense matrix primitives and deterministic random number generation.

Matrices are plain 2-D ``numpy.ndarray`` objects with dtype float64; this
module provides the checked operations the rest of the package is written
against.  Every public operation validates shapes and guarantees a finite
result (NaN/Inf raises instead of propagating silently).

Randomness comes from numpy's PCG64 generator, a 64-bit permuted
congruential generator whose output stream is fully determined by the seed
and identical across platforms.  Generators are never shared: when several
independent streams are needed, :func:`split_rng` derives child generators
through the seed-sequence spawning mechanism.  The reference output vector
for seed 42 is pinned in the test suite and documented in the README.
"""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteError, ShapeError

Matrix = np.ndarray

_ELEMENTWISE_OPS = ("add", "sub", "mul", "div")


def as_matrix(values, rows: int | None = None, cols: int | None = None) -> Matrix:
    """Coerce ``values`` to a 2-D float64 array, optionally checking its shape."""
    a = np.asarray(values, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got {a.ndim}-D data")
    if rows is not None and a.shape[0] != rows:
        raise ShapeError(f"expected {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise ShapeError(f"expected {cols} cols, got {a.shape[1]}")
    return a


def _check_finite(a: Matrix, what: str) -> Matrix:
    if not np.isfinite(a).all():
        raise NonFiniteError(f"{what} produced non-finite values")
    return a


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product; shapes (n, k) x (k, m) -> (n, m)."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        out = a @ b
    return _check_finite(out, "matmul")


def elementwise(a: Matrix, b: Matrix, op: str) -> Matrix:
    """Pointwise ``add``/``sub``/``mul``/``div`` of two same-shape matrices."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    if op not in _ELEMENTWISE_OPS:
        raise ValueError(f"unknown op {op!r}, expected one of {_ELEMENTWISE_OPS}")
    if op == "add":
        out = a + b
    elif op == "sub":
        out = a - b
    elif op == "mul":
        out = a * b
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = a / b
    return _check_finite(out, f"elementwise {op}")


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic generator for ``seed``; same seed, same stream, always."""
    return np.random.Generator(np.random.PCG64(seed))


def split_rng(rng: np.random.Generator, n: int) -> list[np.random.Generator]:
    """Derive ``n`` statistically independent child generators from ``rng``.

    Consumes the parent's spawn state, so repeated splits of one parent give
    distinct children while the whole tree stays a pure function of the
    original seed.
    """
    return rng.spawn(n)


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> Matrix:
    """Weight matrix of shape (fan_in, fan_out) drawn uniformly from [-L, L].

    L = sqrt(6 / (fan_in + fan_out)), the usual variance-preserving bound
    for dense layers.
    """
    if fan_in < 1 or fan_out < 1:
        raise ShapeError(f"fan_in and fan_out must be >= 1, got ({fan_in}, {fan_out})")
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))
