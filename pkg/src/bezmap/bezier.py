r"""Bezier segments, piecewise Bezier curves and their matrix forms.

A degree-``n`` segment is evaluated as

.. math:: p(t) = \sum_{i=0}^{n} {n \choose i} t^i (1-t)^{n-i} c_i,
          \quad t \in [0, 1]

Sampling ``m`` uniformly spaced parameters stacks the basis values into
an ``m x (n+1)`` Bernstein matrix ``B`` so that sampled points are
``P = B @ C`` and a least-squares fit is ``C = pinv(B) @ P``.

A piecewise curve ``<k, n>`` chains ``k`` segments of the same degree,
each starting where the previous one ended. The segment endpoints are the
*explicit* control points (``k + 1`` of them), the others are *implicit*
(``n*k - k`` of them).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError, UnderdeterminedError

__all__ = [
    "BezierSegment",
    "PiecewiseBezier",
    "BernsteinMatrix",
    "OffsetEncoding",
    "bernstein_basis",
    "bernstein_matrix",
    "basis_rows",
    "eval_bezier",
    "restore_curve",
    "restore_matrix",
    "sample_points",
    "fit_segment",
    "degree_elevate",
    "encode_offsets",
    "decode_offsets",
]


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BezierSegment:
    """A single Bezier segment.

    Attributes:
        controls (np.ndarray): Control points, shape ``(degree + 1, 2)``.
    """

    controls: np.ndarray

    def __post_init__(self):
        c = _frozen(self.controls)
        if c.ndim != 2 or c.shape[1] != 2 or c.shape[0] < 2:
            raise ShapeError(f"controls must have shape (n+1, 2) with n >= 1, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise DomainError("control points must be finite")
        object.__setattr__(self, "controls", c)

    @property
    def degree(self) -> int:
        return self.controls.shape[0] - 1

    def __eq__(self, other):
        if not isinstance(other, BezierSegment):
            return NotImplemented
        return np.array_equal(self.controls, other.controls)

    def reversed(self) -> "BezierSegment":
        return BezierSegment(self.controls[::-1])


@dataclass(frozen=True, eq=False)
class PiecewiseBezier:
    """``k`` Bezier segments of a common degree joined end to start.

    Build one from a flat control sequence with :meth:`from_controls` or
    from segments directly; the constructor checks the consistent-degree
    and positional-continuity rules.
    """

    segments: tuple
    class_id: int = 0
    # Offset encoding this curve was decoded from, kept so that re-encoding
    # reproduces it bit for bit. Not part of the value.
    _encoding: "OffsetEncoding | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ShapeError("a piecewise curve needs at least one segment")
        n = segs[0].degree
        for j, s in enumerate(segs):
            if s.degree != n:
                raise ShapeError(f"segment {j} has degree {s.degree}, expected {n}")
        for j in range(len(segs) - 1):
            if not np.array_equal(segs[j].controls[-1], segs[j + 1].controls[0]):
                raise ShapeError(f"segments {j} and {j + 1} do not share their joint point")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def from_controls(cls, controls, degree: int, class_id: int = 0) -> "PiecewiseBezier":
        """Split a flat ``(n*k + 1, 2)`` control sequence into segments."""
        c = np.asarray(controls, dtype=float)
        if degree < 1 or c.ndim != 2 or c.shape[1] != 2 or (len(c) - 1) % degree or len(c) < 2:
            raise ShapeError(f"{len(c)} control points cannot form degree-{degree} pieces")
        k = (len(c) - 1) // degree
        segs = [BezierSegment(c[j * degree:(j + 1) * degree + 1]) for j in range(k)]
        return cls(tuple(segs), class_id)

    @property
    def degree(self) -> int:
        return self.segments[0].degree

    @property
    def pieces(self) -> int:
        return len(self.segments)

    @property
    def controls(self) -> np.ndarray:
        """Flat control sequence without duplicated joints, ``(n*k + 1, 2)``."""
        parts = [self.segments[0].controls] + [s.controls[1:] for s in self.segments[1:]]
        return np.concatenate(parts, axis=0)

    @property
    def explicit_points(self) -> np.ndarray:
        return self.controls[:: self.degree]

    @property
    def implicit_points(self) -> np.ndarray:
        n = self.degree
        c = self.controls
        mask = np.ones(len(c), dtype=bool)
        mask[::n] = False
        return c[mask]

    def __eq__(self, other):
        if not isinstance(other, PiecewiseBezier):
            return NotImplemented
        return (
            self.class_id == other.class_id
            and self.degree == other.degree
            and np.array_equal(self.controls, other.controls)
            and self.pieces == other.pieces
        )


@dataclass(frozen=True, eq=False)
class BernsteinMatrix:
    degree: int
    samples: int
    forward: np.ndarray
    pinv: np.ndarray


@dataclass(frozen=True, eq=False)
class OffsetEncoding:
    """Explicit points plus per-segment implicit offsets.

    ``offsets`` has shape ``(k, n - 1, 2)``: the implicit controls of each
    segment measured from the midpoint of that segment's two endpoints.
    """

    explicit_points: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        e = _frozen(self.explicit_points)
        o = _frozen(self.offsets)
        if e.ndim != 2 or e.shape[1] != 2 or len(e) < 2:
            raise ShapeError(f"explicit points must have shape (k+1, 2), got {e.shape}")
        if o.size == 0:
            o = _frozen(np.zeros((len(e) - 1, 0, 2)))
        if o.ndim != 3 or o.shape[0] != len(e) - 1 or o.shape[2] != 2:
            raise ShapeError(f"offsets must have shape (k, n-1, 2), got {o.shape}")
        object.__setattr__(self, "explicit_points", e)
        object.__setattr__(self, "offsets", o)


def bernstein_basis(i: int, n: int, t: float) -> float:
    """Value of the ``i``-th Bernstein polynomial of degree ``n`` at ``t``."""
    if n < 0 or not 0 <= i <= n:
        raise DomainError(f"basis index {i} out of range for degree {n}")
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t={t} outside [0, 1]")
    return math.comb(n, i) * t**i * (1.0 - t) ** (n - i)


def basis_rows(n: int, t) -> np.ndarray:
    """Bernstein basis at each parameter in ``t``, shape ``(len(t), n + 1)``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any((t < 0.0) | (t > 1.0)) or not np.all(np.isfinite(t)):
        raise DomainError("parameters must lie in [0, 1]")
    i = np.arange(n + 1)
    coef = np.array([math.comb(n, j) for j in i], dtype=float)
    return coef * t[:, None] ** i * (1.0 - t[:, None]) ** (n - i)


@functools.lru_cache(maxsize=64)
def bernstein_matrix(n: int, m: int) -> BernsteinMatrix:
    """Bernstein matrix for ``m`` uniform samples of a degree-``n`` curve.

    Row ``r`` holds the basis at ``t = r / (m - 1)``. The pseudo-inverse is
    taken through an SVD because the normal equations lose accuracy quickly
    as the degree grows. Results are cached and read-only.
    """
    if n < 1:
        raise DomainError(f"degree must be >= 1, got {n}")
    if m < n + 1:
        raise UnderdeterminedError(f"{m} samples cannot determine {n + 1} control points")
    forward = basis_rows(n, np.linspace(0.0, 1.0, m))
    pinv = np.linalg.pinv(forward)
    return BernsteinMatrix(n, m, _frozen(forward), _frozen(pinv))


def eval_bezier(seg: BezierSegment, t):
    """Evaluate a segment at scalar ``t`` (returns ``(2,)``) or an array of them."""
    pts = basis_rows(seg.degree, t) @ seg.controls
    return pts[0] if np.ndim(t) == 0 else pts


def restore_matrix(degree: int, pieces: int, m_per_segment: int) -> np.ndarray:
    """Sparse-ish block matrix ``S`` with ``restore_curve(pb) == S @ pb.controls``."""
    if m_per_segment < 2:
        raise DomainError("need at least 2 samples per segment")
    B = basis_rows(degree, np.linspace(0.0, 1.0, m_per_segment))
    rows = pieces * (m_per_segment - 1) + 1
    S = np.zeros((rows, degree * pieces + 1))
    for j in range(pieces):
        r0 = j * (m_per_segment - 1)
        first = 0 if j == 0 else 1
        S[r0 + first:r0 + m_per_segment, j * degree:(j + 1) * degree + 1] = B[first:]
    return S


def restore_curve(pb: PiecewiseBezier, m_per_segment: int) -> np.ndarray:
    """Sample every segment ``m_per_segment`` times and chain the samples.

    The shared joint between consecutive segments appears once, so the
    result has ``k * (m_per_segment - 1) + 1`` points.
    """
    if m_per_segment < 2:
        raise DomainError("need at least 2 samples per segment")
    B = bernstein_matrix(pb.degree, m_per_segment).forward
    parts = [B @ pb.segments[0].controls]
    parts += [(B @ s.controls)[1:] for s in pb.segments[1:]]
    return np.concatenate(parts, axis=0)


def sample_points(pb: PiecewiseBezier, num: int) -> np.ndarray:
    """Sample ``num`` points at uniformly spaced global parameters in ``[0, k]``."""
    if num < 2:
        raise DomainError("need at least 2 samples")
    u = np.linspace(0.0, pb.pieces, num)
    j = np.minimum(np.floor(u).astype(int), pb.pieces - 1)
    t = u - j
    B = basis_rows(pb.degree, t)
    ctrl = np.stack([s.controls for s in pb.segments])  # (k, n+1, 2)
    return np.einsum("ri,rid->rd", B, ctrl[j])


def fit_segment(points, n: int) -> BezierSegment:
    """Least-squares degree-``n`` segment through ordered points.

    Points are paired with uniformly spaced parameters, so the input should
    already be resampled evenly along the curve.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 2:
        raise ShapeError(f"points must have shape (m, 2), got {P.shape}")
    bm = bernstein_matrix(n, len(P))
    return BezierSegment(bm.pinv @ P)


def degree_elevate(seg: BezierSegment) -> BezierSegment:
    """Same curve expressed with one more control point."""
    c = seg.controls
    n1 = seg.degree + 1
    i = np.arange(1, n1)[:, None] / n1
    inner = i * c[:-1] + (1.0 - i) * c[1:]
    return BezierSegment(np.vstack([c[:1], inner, c[-1:]]))


def encode_offsets(pb: PiecewiseBezier) -> OffsetEncoding:
    if pb._encoding is not None:
        return pb._encoding
    n = pb.degree
    ctrl = np.stack([s.controls for s in pb.segments])  # (k, n+1, 2)
    center = 0.5 * (ctrl[:, :1] + ctrl[:, -1:])
    return OffsetEncoding(pb.explicit_points, ctrl[:, 1:n] - center)


def decode_offsets(enc: OffsetEncoding, n: int, class_id: int = 0) -> PiecewiseBezier:
    if n < 1:
        raise ShapeError(f"degree must be >= 1, got {n}")
    if enc.offsets.shape[1] != n - 1:
        raise ShapeError(
            f"degree {n} needs {n - 1} offsets per segment, got {enc.offsets.shape[1]}"
        )
    e = enc.explicit_points
    segs = []
    for j in range(len(e) - 1):
        center = 0.5 * (e[j] + e[j + 1])
        segs.append(BezierSegment(np.vstack([e[j], center + enc.offsets[j], e[j + 1]])))
    return PiecewiseBezier(tuple(segs), class_id, _encoding=enc)
