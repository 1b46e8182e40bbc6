"""Square matrices of tagged graded elements.

Used for connection 1-forms, curvature 2-forms and their traces.  Entries
are TaggedElement values sharing one parity; matrix multiplication keeps
the entry order (left factor entries multiply from the left), so graded
signs stay with the entry arithmetic.
"""

from __future__ import annotations

from typing import Callable, List

from .brst import TaggedElement


Matrix = List[List[TaggedElement]]


def mat_from_function(size: int, fn: Callable[[int, int], TaggedElement]) -> Matrix:
    return [[fn(i, j) for j in range(size)] for i in range(size)]


def mat_zero(dim: int, size: int, parity: int = 0) -> Matrix:
    return [[TaggedElement.zero(dim, parity) for _ in range(size)]
            for _ in range(size)]


def mat_identity(dim: int, size: int) -> Matrix:
    return [[TaggedElement.scalar(dim, 1 if i == j else 0)
             for j in range(size)] for i in range(size)]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, factor) -> Matrix:
    return [[x * factor for x in row] for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    size = len(a)
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = a[i][0] * b[0][j]
            for k in range(1, size):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_trace(a: Matrix) -> TaggedElement:
    acc = a[0][0]
    for i in range(1, len(a)):
        acc = acc + a[i][i]
    return acc


def mat_mul_trace(a: Matrix, b: Matrix) -> TaggedElement:
    """Trace of a·b without forming the product matrix."""
    size = len(a)
    acc = None
    for i in range(size):
        for j in range(size):
            term = a[i][j] * b[j][i]
            acc = term if acc is None else acc + term
    return acc


def mat_power(a: Matrix, exponent: int) -> Matrix:
    if exponent < 1:
        raise ValueError("exponent must be positive")
    out = a
    for _ in range(exponent - 1):
        out = mat_mul(out, a)
    return out


def mat_trace_of_power(a: Matrix, exponent: int) -> TaggedElement:
    if exponent == 1:
        return mat_trace(a)
    half = mat_power(a, exponent // 2)
    if exponent % 2 == 0:
        return mat_mul_trace(half, half)
    return mat_mul_trace(mat_mul(half, half), a)


def mat_apply_d(a: Matrix) -> Matrix:
    from .brst import apply_d
    return [[apply_d(x) for x in row] for row in a]
