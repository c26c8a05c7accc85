"""Poincare disc and ball geometry: points, the hyperbolic metric, Moebius maps.

Maps are unit-determinant 2x2 complex matrices.  In the planar model (n=2)
they are kept in disc-preserving form (c = conj(b), d = conj(a)) and act on
the unit disc by the usual fractional-linear formula.  In the spatial model
(n=3) they are kept in the upper half-space chart and evaluated through the
quaternion form of the action; one fixed Cayley transform carries points
between the chart and the unit ball, so callers only ever see ball
coordinates.
"""

from __future__ import annotations

import cmath
import enum
import math

import numpy as np

from .errors import (
    InternalError,
    ModelMismatchError,
    NumericalOverflowError,
    UsageError,
)
from .policy import POLICY

_CANON_EPS = 1e-12
_NORTH = np.array([0.0, 0.0, 1.0])


class MapClass(enum.Enum):
    """Conjugacy type of a Moebius map."""

    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    LOXODROMIC = "loxodromic"


class InteriorPoint:
    """Point of the open unit ball, a length-2 or length-3 float vector."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        c = np.asarray(coords, dtype=float).reshape(-1)
        if c.size not in (2, 3):
            raise UsageError(f"interior point needs 2 or 3 coordinates, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise UsageError("interior point has non-finite coordinates")
        if float(np.dot(c, c)) >= 1.0:
            raise UsageError(f"interior point must have norm < 1, got |x| = {np.linalg.norm(c):.6g}")
        c.setflags(write=False)
        self.coords = c

    @property
    def model(self):
        return self.coords.size

    @property
    def norm(self):
        return float(np.linalg.norm(self.coords))

    def __repr__(self):
        vals = ", ".join(f"{v:.6g}" for v in self.coords)
        return f"InteriorPoint([{vals}])"


class BoundaryPoint:
    """Point of the unit sphere; renormalized to unit norm on construction."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        c = np.asarray(coords, dtype=float).reshape(-1)
        if c.size not in (2, 3):
            raise UsageError(f"boundary point needs 2 or 3 coordinates, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise UsageError("boundary point has non-finite coordinates")
        norm = float(np.linalg.norm(c))
        if norm < 1e-12:
            raise UsageError("boundary point direction is numerically zero")
        c = c / norm
        c.setflags(write=False)
        self.coords = c

    @property
    def model(self):
        return self.coords.size

    def __repr__(self):
        vals = ", ".join(f"{v:.6g}" for v in self.coords)
        return f"BoundaryPoint([{vals}])"


def origin(model):
    """The ball center of the given model dimension."""
    return InteriorPoint(np.zeros(int(model)))


def _canonical_sign(a, b, c, d):
    # Fix the +/-M ambiguity: first nonzero entry (row-major) gets a
    # nonnegative real part, ties broken toward nonnegative imaginary part.
    for e in (a, b, c, d):
        if abs(e) > _CANON_EPS:
            if e.real < -_CANON_EPS or (abs(e.real) <= _CANON_EPS and e.imag < 0.0):
                return -a, -b, -c, -d
            return a, b, c, d
    raise InternalError("zero matrix cannot be canonicalized")


class MoebiusMap:
    """Unit-determinant 2x2 complex matrix tagged with its model dimension.

    Construction renormalizes the determinant to 1, canonicalizes the
    overall sign, and for the planar model checks the disc-preserving form.
    Instances are immutable value objects.
    """

    __slots__ = ("a", "b", "c", "d", "model")

    def __init__(self, a, b, c, d, model):
        model = int(model)
        if model not in (2, 3):
            raise UsageError(f"model dimension must be 2 or 3, got {model}")
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        if not (abs(det) > 1e-12 and cmath.isfinite(det)):
            raise UsageError(f"matrix is singular or non-finite (det = {det:.3g})")
        if det != 1.0:
            s = cmath.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        a, b, c, d = _canonical_sign(a, b, c, d)
        if model == 2:
            tol = POLICY.construction_tol * max(1.0, abs(a), abs(b))
            if abs(c - b.conjugate()) > tol or abs(d - a.conjugate()) > tol:
                raise UsageError(
                    "planar map is not disc preserving: need c = conj(b), d = conj(a)"
                )
        self.a, self.b, self.c, self.d = a, b, c, d
        self.model = model

    @classmethod
    def from_matrix(cls, m, model):
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise UsageError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1], model)

    @classmethod
    def identity(cls, model):
        return cls(1.0, 0.0, 0.0, 1.0, model)

    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self):
        return self.a + self.d

    def entry_vector(self):
        """The 8 real coordinates (re, im interleaved) used for dedup."""
        return np.array([
            self.a.real, self.a.imag, self.b.real, self.b.imag,
            self.c.real, self.c.imag, self.d.real, self.d.imag,
        ])

    def entry_distance(self, other):
        """Entrywise max complex-modulus distance between canonical forms."""
        return max(
            abs(self.a - other.a), abs(self.b - other.b),
            abs(self.c - other.c), abs(self.d - other.d),
        )

    def is_identity(self, tol=None):
        tol = POLICY.construction_tol if tol is None else tol
        return (
            abs(self.a - 1.0) <= tol and abs(self.d - 1.0) <= tol
            and abs(self.b) <= tol and abs(self.c) <= tol
        )

    def __repr__(self):
        return (
            f"MoebiusMap(a={self.a:.6g}, b={self.b:.6g}, "
            f"c={self.c:.6g}, d={self.d:.6g}, model={self.model})"
        )


def _check_same_model(f, g):
    if f.model != g.model:
        raise ModelMismatchError(f"cannot mix models {f.model} and {g.model}")


def compose(f, g):
    """The map z -> f(g(z)), i.e. the matrix product f.g."""
    _check_same_model(f, g)
    return MoebiusMap(
        f.a * g.a + f.b * g.c,
        f.a * g.b + f.b * g.d,
        f.c * g.a + f.d * g.c,
        f.c * g.b + f.d * g.d,
        f.model,
    )


def inverse(g):
    """The inverse map, via the unit-determinant adjugate."""
    return MoebiusMap(g.d, -g.b, -g.c, g.a, g.model)


def classify(g, tol=None):
    """Conjugacy class from the squared trace.

    Identity wins when the canonical matrix is the identity within
    tolerance; otherwise tau = trace^2 decides: parabolic at tau = 4,
    elliptic for real tau in [0, 4), loxodromic for everything else.
    """
    tol = POLICY.construction_tol if tol is None else tol
    if g.is_identity(tol):
        return MapClass.IDENTITY
    tau = g.trace * g.trace
    if abs(tau - 4.0) < tol:
        return MapClass.PARABOLIC
    if abs(tau.imag) < tol and -tol <= tau.real < 4.0:
        return MapClass.ELLIPTIC
    return MapClass.LOXODROMIC


# ---------------------------------------------------------------------------
# Cayley transform between the upper half space and the unit ball (n=3).
# The fixed choice: reflect the height coordinate, then invert in the sphere
# of radius sqrt(2) about the north pole.  It sends (0,0,1) to the center,
# the boundary plane to the sphere, and infinity to the north pole.


def _halfspace_to_ball(u):
    v = np.array([u[0], u[1], -u[2]]) - _NORTH
    return _NORTH + (2.0 / float(np.dot(v, v))) * v


def _ball_to_halfspace(y):
    v = np.asarray(y, dtype=float) - _NORTH
    nn = float(np.dot(v, v))
    if nn < 1e-30:
        raise InternalError("north pole has no finite half-space image")
    w = _NORTH + (2.0 / nn) * v
    return np.array([w[0], w[1], -w[2]])


def _chart_boundary_to_sphere(zeta):
    """Complex boundary chart value (None means infinity) to a sphere point."""
    if zeta is None:
        return _NORTH.copy()
    x, y = zeta.real, zeta.imag
    s = x * x + y * y + 1.0
    return np.array([2.0 * x / s, 2.0 * y / s, (s - 2.0) / s])


def _sphere_to_chart_boundary(p):
    """Sphere point to the complex boundary chart (None means infinity)."""
    p = np.asarray(p, dtype=float)
    if float(np.dot(p - _NORTH, p - _NORTH)) < 1e-24:
        return None
    w = _ball_to_halfspace(p)
    return complex(w[0], w[1])


def _apply_halfspace(g, zeta, t):
    """Quaternion evaluation of an SL(2,C) matrix on (zeta, t), t >= 0."""
    den_c = g.c * zeta + g.d
    den = abs(den_c) ** 2 + (abs(g.c) ** 2) * t * t
    if den < 1e-300:
        raise NumericalOverflowError("half-space evaluation hit the pole")
    num = (g.a * zeta + g.b) * den_c.conjugate() + g.a * g.c.conjugate() * t * t
    return num / den, t / den


def apply_interior(g, z):
    """Evaluate the map at an interior point of the ball.

    Parameters
    ----------
    g : MoebiusMap
    z : InteriorPoint with matching model dimension.

    Returns
    -------
    InteriorPoint.  Raises NumericalOverflowError when the image is within
    1e-14 of the sphere, the float-precision cliff.
    """
    return apply_interior_radial(g, z)[0]


def apply_interior_radial(g, z):
    """Evaluate at an interior point, also returning 1 - |image|^2.

    The squared-gap is computed from exact algebraic identities rather than
    1 - |w|, so it keeps full relative precision for deep orbit points.
    """
    if z.model != g.model:
        raise ModelMismatchError(f"point model {z.model} does not match map model {g.model}")
    if g.model == 2:
        zeta = complex(z.coords[0], z.coords[1])
        den = g.c * zeta + g.d
        if abs(den) < 1e-300:
            raise NumericalOverflowError("interior evaluation hit a pole")
        w = (g.a * zeta + g.b) / den
        # |c z + d|^2 - |a z + b|^2 = (|a|^2 - |b|^2)(1 - |z|^2) = 1 - |z|^2
        one_minus_sq = (1.0 - (zeta.real ** 2 + zeta.imag ** 2)) / (abs(den) ** 2)
        coords = np.array([w.real, w.imag])
    else:
        u = _ball_to_halfspace(z.coords)
        zeta, t = complex(u[0], u[1]), u[2]
        w_c, t2 = _apply_halfspace(g, zeta, t)
        x = np.array([w_c.real, w_c.imag, t2])
        coords = _halfspace_to_ball(x)
        v = np.array([x[0], x[1], -x[2]]) - _NORTH
        one_minus_sq = 4.0 * t2 / float(np.dot(v, v))
    if one_minus_sq <= 0.0 or 1.0 - one_minus_sq >= (1.0 - POLICY.overflow_tol) ** 2:
        raise NumericalOverflowError(
            "image point is within 1e-14 of the sphere; reduce the depth"
        )
    nrm = float(np.dot(coords, coords))
    if nrm >= 1.0:
        # trust the stable gap and pull the point back inside
        coords = coords * math.sqrt(max(1.0 - one_minus_sq, 0.0) / nrm)
    return InteriorPoint(coords), float(one_minus_sq)


def apply_boundary(g, x):
    """Evaluate the boundary extension of the map on the unit sphere.

    For the planar model the pole guard (|c*zeta + d| < 1e-14) can only
    trigger on float degeneracies, since the pole lies outside the closed
    disc; the image of infinity, a/c, stands in.  For the spatial model the
    pole genuinely sits on the boundary plane and its image is infinity,
    i.e. the Cayley image (0,0,1).
    """
    if x.model != g.model:
        raise ModelMismatchError(f"point model {x.model} does not match map model {g.model}")
    if g.model == 2:
        zeta = complex(x.coords[0], x.coords[1])
        den = g.c * zeta + g.d
        if abs(den) < POLICY.pole_tol:
            w = g.a / g.c
        else:
            w = (g.a * zeta + g.b) / den
        return BoundaryPoint([w.real, w.imag])
    zeta = _sphere_to_chart_boundary(x.coords)
    if zeta is None:
        w = None if abs(g.c) < POLICY.pole_tol else g.a / g.c
    else:
        den = g.c * zeta + g.d
        if abs(den) < POLICY.pole_tol:
            w = None
        else:
            w = (g.a * zeta + g.b) / den
    return BoundaryPoint(_chart_boundary_to_sphere(w))


def fixed_points(g):
    """Boundary fixed points of a parabolic (1 point) or loxodromic (2) map.

    Roots of c z^2 + (d - a) z - b = 0 in the acting chart, mapped to the
    sphere.  A vanishing leading coefficient contributes the chart's point
    at infinity.
    """
    cls = classify(g)
    if cls not in (MapClass.PARABOLIC, MapClass.LOXODROMIC):
        raise UsageError(f"fixed points on the sphere need parabolic or loxodromic, got {cls.value}")
    scale = max(abs(g.a), abs(g.b), abs(g.c), abs(g.d))
    roots = []
    if abs(g.c) > _CANON_EPS * scale:
        if cls is MapClass.PARABOLIC:
            roots.append((g.a - g.d) / (2.0 * g.c))
        else:
            sq = cmath.sqrt((g.a - g.d) ** 2 + 4.0 * g.b * g.c)
            roots.append(((g.a - g.d) + sq) / (2.0 * g.c))
            roots.append(((g.a - g.d) - sq) / (2.0 * g.c))
    else:
        roots.append(None)  # infinity
        if cls is MapClass.LOXODROMIC:
            roots.append(g.b / (g.d - g.a))
    if g.model == 2:
        out = []
        for r in roots:
            if r is None:
                raise InternalError("disc-form parabolic or loxodromic cannot fix infinity")
            out.append(BoundaryPoint([r.real, r.imag]))
        return out
    return [BoundaryPoint(_chart_boundary_to_sphere(r)) for r in roots]


def hyperbolic_distance(x, y):
    """Hyperbolic distance between interior points of the same ball.

    cosh d = 1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2)).
    """
    if x.model != y.model:
        raise ModelMismatchError("distance needs points of the same model")
    return _distance_coords(x.coords, y.coords)


def _distance_coords(a, b):
    diff = a - b
    qa = 1.0 - float(np.dot(a, a))
    qb = 1.0 - float(np.dot(b, b))
    arg = 1.0 + 2.0 * float(np.dot(diff, diff)) / (qa * qb)
    return math.acosh(max(arg, 1.0))


def distance_to_origin_from_gap(one_minus_sq, norm):
    """log((1+|w|)/(1-|w|)) computed from a stable 1-|w|^2."""
    gap = one_minus_sq / (1.0 + norm)
    return math.log((1.0 + norm) / gap) if gap > 0.0 else math.inf


def distances_from(point_coords, points, gaps_sq=None):
    """Vector of hyperbolic distances from one interior point to many.

    Parameters
    ----------
    point_coords : (n,) float array, inside the unit ball.
    points : (N, n) float array of interior points.
    gaps_sq : optional (N,) array of 1 - |points|^2 values; recomputed from
        the coordinates when absent.
    """
    points = np.asarray(points, dtype=float)
    if gaps_sq is None:
        gaps_sq = 1.0 - np.einsum("ij,ij->i", points, points)
    diff = points - point_coords[None, :]
    qa = 1.0 - float(np.dot(point_coords, point_coords))
    arg = 1.0 + 2.0 * np.einsum("ij,ij->i", diff, diff) / (qa * gaps_sq)
    return np.arccosh(np.maximum(arg, 1.0))


def translation_to_origin(z):
    """The standard isometry sending an interior point to the ball center."""
    if z.model == 2:
        zeta = complex(z.coords[0], z.coords[1])
        s = math.sqrt(1.0 - (zeta.real ** 2 + zeta.imag ** 2))
        return MoebiusMap(1.0 / s, -zeta / s, -zeta.conjugate() / s, 1.0 / s, 2)
    u = _ball_to_halfspace(z.coords)
    zeta, t = complex(u[0], u[1]), u[2]
    rt = math.sqrt(t)
    return MoebiusMap(1.0 / rt, -zeta / rt, 0.0, rt, 3)


class BoundaryGeodesic:
    """The geodesic with two distinct sphere endpoints.

    Parametrized by signed hyperbolic arclength from the point closest to
    the ball center (the apex), positive direction toward the endpoint q.
    """

    def __init__(self, p, q):
        if p.model != q.model:
            raise ModelMismatchError("geodesic endpoints must share a model")
        pc, qc = p.coords, q.coords
        if float(np.linalg.norm(pc - qc)) < 1e-9:
            raise UsageError("geodesic endpoints coincide")
        dot = float(np.dot(pc, qc))
        self.p, self.q = p, q
        if dot <= -1.0 + 1e-12:
            # diameter through the center
            self._r0 = 0.0
            self._u = np.zeros(pc.size)
            self._w = qc.copy()
        else:
            center = (pc + qc) / (1.0 + dot)
            cn = float(np.linalg.norm(center))
            rho = math.sqrt(max(cn * cn - 1.0, 0.0))
            self._u = center / cn
            self._r0 = cn - rho
            w = qc - float(np.dot(qc, self._u)) * self._u
            self._w = w / float(np.linalg.norm(w))

    @property
    def apex(self):
        """The point of the geodesic closest to the ball center."""
        return InteriorPoint(self._r0 * self._u)

    def point_at(self, t):
        """Interior point at signed hyperbolic distance t from the apex."""
        tau = math.tanh(0.5 * t)
        if self._r0 == 0.0:
            return InteriorPoint(tau * self._w)
        zeta = (self._r0 + 1j * tau) / (1.0 + 1j * self._r0 * tau)
        return InteriorPoint(zeta.real * self._u + zeta.imag * self._w)
