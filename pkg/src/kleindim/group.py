"""Finitely generated groups: presentations, orbit enumeration, packing data.

Enumeration is breadth-first over reduced words in the generators and their
inverses, with matrix-level deduplication, so relations in the group are
discovered numerically rather than assumed.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import (
    DegenerateBasepointError,
    InternalError,
    LoxodromicNotFoundError,
    ResourceLimitError,
    UsageError,
)
from .geometry import (
    BoundaryGeodesic,
    InteriorPoint,
    MapClass,
    MoebiusMap,
    apply_interior_radial,
    classify,
    compose,
    fixed_points,
    hyperbolic_distance,
    inverse,
    origin,
)
from .policy import POLICY


class GroupPresentation:
    """A named list of generating Moebius maps in one model dimension.

    Discreteness is an input contract and is not verified; for two-generator
    inputs a necessary trace inequality is checked and a warning (never an
    error) is emitted when it fails.
    """

    def __init__(self, generators, model, name=""):
        self.model = int(model)
        self.generators = list(generators)
        self.name = str(name)
        if not self.generators:
            raise UsageError("presentation needs at least one generator")
        for g in self.generators:
            if not isinstance(g, MoebiusMap):
                raise UsageError("generators must be MoebiusMap instances")
            if g.model != self.model:
                raise UsageError("generator model does not match the presentation")
            if g.is_identity():
                raise UsageError("identity generators are not allowed")
        for i, g in enumerate(self.generators):
            for h in self.generators[i + 1:]:
                if g.entry_distance(h) <= POLICY.construction_tol:
                    raise UsageError("duplicate generators (after canonicalization)")
        if len(self.generators) == 2:
            self._trace_inequality_warning()

    def _trace_inequality_warning(self):
        # necessary condition for a discrete non-elementary two-generator
        # group; equality is attained by arithmetic examples, hence the slack
        ga, gb = self.generators
        comm = compose(compose(ga, gb), compose(inverse(ga), inverse(gb)))
        lhs = abs(ga.trace * ga.trace - 4.0) + abs(comm.trace - 2.0)
        if lhs < 1.0 - 1e-9:
            warnings.warn(
                f"two-generator trace inequality fails ({lhs:.6g} < 1); "
                "the group may be non-discrete or elementary",
                stacklevel=3,
            )

    def __repr__(self):
        return f"GroupPresentation(name={self.name!r}, model={self.model}, k={len(self.generators)})"


@dataclass
class GroupElement:
    """One enumerated group element with cached orbit data.

    shell_index is the dyadic shell k with 2^-k <= 1-|g(z)| < 2^-k+1, or
    None when the orbit point is the ball center (gap 1).  displacement is
    the hyperbolic distance from the basepoint to the orbit point.
    """

    map: MoebiusMap
    word: tuple
    orbit_point: InteriorPoint
    radial_gap: float
    shell_index: int | None
    displacement: float

    @property
    def word_length(self):
        return len(self.word)


def shell_index_of(gap):
    """Dyadic shell index: the k >= 1 with 2^-k <= gap < 2^-k+1, else None."""
    if not gap > 0.0:
        raise UsageError(f"radial gap must be positive, got {gap:.3g}")
    if gap >= 1.0:
        return None
    m, e = math.frexp(gap)  # gap = m * 2^e with m in [0.5, 1)
    return 1 - e


class _MatrixBuckets:
    """Tolerance dedup for canonical matrices without quadratic scans.

    Matrices live as 8 real coordinates on a coarse integer grid; a query
    touches at most 2 buckets per axis, then checks the exact entrywise
    complex-modulus distance.
    """

    _BUCKET = 1e-3

    def __init__(self, tol):
        if tol >= self._BUCKET / 2.0:
            raise UsageError(f"dedup tolerance {tol:.3g} too coarse for the bucket grid")
        self.tol = tol
        self._buckets = {}
        self._maps = []

    def _key(self, vec):
        return tuple(int(math.floor(v / self._BUCKET)) for v in vec)

    def contains(self, m):
        vec = m.entry_vector()
        ranges = []
        for v in vec:
            lo = int(math.floor((v - self.tol) / self._BUCKET))
            hi = int(math.floor((v + self.tol) / self._BUCKET))
            ranges.append(range(lo, hi + 1))
        for key in itertools.product(*ranges):
            for idx in self._buckets.get(key, ()):
                if self._maps[idx].entry_distance(m) <= self.tol:
                    return True
        return False

    def add(self, m):
        key = self._key(m.entry_vector())
        self._buckets.setdefault(key, []).append(len(self._maps))
        self._maps.append(m)


class OrbitSet:
    """Deduplicated orbit of a basepoint under all words up to a length.

    elements[0] is the identity; the list follows the breadth-first
    enumeration order.  Flat arrays over the elements (points, gaps, shell
    indices, displacements, word lengths) are exposed for vectorized math.
    """

    def __init__(self, presentation, basepoint, elements, max_word_length, dedup_tolerance):
        self.presentation = presentation
        self.basepoint = basepoint
        self.elements = elements
        self.max_word_length = int(max_word_length)
        self.dedup_tolerance = float(dedup_tolerance)
        n = len(elements)
        self.points = np.empty((n, presentation.model))
        self.gaps = np.empty(n)
        self.shells = np.empty(n, dtype=int)
        self.displacements = np.empty(n)
        self.word_lengths = np.empty(n, dtype=int)
        for i, el in enumerate(elements):
            self.points[i] = el.orbit_point.coords
            self.gaps[i] = el.radial_gap
            self.shells[i] = el.shell_index if el.shell_index is not None else 0
            self.displacements[i] = el.displacement
            self.word_lengths[i] = len(el.word)

    @property
    def model(self):
        return self.presentation.model

    def __len__(self):
        return len(self.elements)

    def shell_counts(self):
        """Mapping shell index -> element count, shelled elements only."""
        ks, counts = np.unique(self.shells[self.shells > 0], return_counts=True)
        return dict(zip(ks.tolist(), counts.tolist()))

    def gaps_squared(self):
        """1 - |g(z)|^2 per element, reconstructed from the stable gap."""
        return self.gaps * (2.0 - self.gaps)


def _make_element(m, word, basepoint):
    pt, one_minus_sq = apply_interior_radial(m, basepoint)
    gap = one_minus_sq / (1.0 + pt.norm)
    disp = hyperbolic_distance(basepoint, pt)
    return GroupElement(
        map=m,
        word=word,
        orbit_point=pt,
        radial_gap=gap,
        shell_index=shell_index_of(gap),
        displacement=disp,
    )


def enumerate_orbit(presentation, basepoint, max_word_length, dedup_tolerance=None, cap=None):
    """Breadth-first reduced-word enumeration with matrix deduplication.

    Parameters
    ----------
    presentation : GroupPresentation
    basepoint : InteriorPoint
    max_word_length : int >= 1
    dedup_tolerance : entrywise matrix distance under which two words are
        the same element (default POLICY.dedup_tol).
    cap : kept-element resource limit (default POLICY.orbit_cap).

    Word order is by length, then by parent order, then by letter with the
    generator before its inverse (alphabet g1, g1^-1, g2, g2^-1, ...).
    Words whose matrix duplicates an earlier element are dropped and not
    expanded; the surviving set of words is closed under prefixes.
    """
    if basepoint.model != presentation.model:
        raise UsageError("basepoint model does not match the presentation")
    max_word_length = int(max_word_length)
    if max_word_length < 1:
        raise UsageError("max_word_length must be at least 1")
    dedup_tolerance = POLICY.dedup_tol if dedup_tolerance is None else float(dedup_tolerance)
    cap = POLICY.orbit_cap if cap is None else int(cap)

    alphabet = []
    for i, g in enumerate(presentation.generators, start=1):
        alphabet.append((i, g))
        alphabet.append((-i, inverse(g)))

    seen = _MatrixBuckets(dedup_tolerance)
    identity = MoebiusMap.identity(presentation.model)
    seen.add(identity)
    elements = [_make_element(identity, (), basepoint)]
    frontier = [(identity, ())]

    for length in range(1, max_word_length + 1):
        next_frontier = []
        for m, word in frontier:
            last = word[-1] if word else 0
            for letter, gen in alphabet:
                if letter == -last:
                    continue  # immediate cancellation, word not reduced
                child = compose(m, gen)
                if seen.contains(child):
                    continue
                seen.add(child)
                new_word = word + (letter,)
                elements.append(_make_element(child, new_word, basepoint))
                if len(elements) > cap:
                    raise ResourceLimitError(
                        f"orbit enumeration exceeded {cap} elements at word length {length}"
                    )
                next_frontier.append((child, new_word))
        frontier = next_frontier
        if not frontier:
            break

    return OrbitSet(presentation, basepoint, elements, max_word_length, dedup_tolerance)


def find_loxodromic(presentation, search_depth):
    """First loxodromic element in enumeration order, up to search_depth.

    Raises LoxodromicNotFoundError when none exists at that depth; the
    group may be elementary (or generated by parabolics and elliptics only),
    or the search may simply need to go deeper.
    """
    orbit = enumerate_orbit(presentation, origin(presentation.model), search_depth)
    for el in orbit.elements[1:]:
        if classify(el.map) is MapClass.LOXODROMIC:
            return el
    raise LoxodromicNotFoundError(
        f"no loxodromic element within word length {search_depth}; "
        "the group may be elementary, or try a deeper search"
    )


def choose_basepoint(h, presentation, search_depth):
    """Point on the axis of a loxodromic element, clear of elliptic fixed points.

    Starts at the point of the axis closest to the ball center and slides
    along the axis in hyperbolic steps of 0.1 while any enumerated elliptic
    element fixes the candidate (displacement below 1e-9).
    """
    m = h.map if isinstance(h, GroupElement) else h
    if classify(m) is not MapClass.LOXODROMIC:
        raise UsageError("basepoint selection needs a loxodromic element")
    fps = fixed_points(m)
    geo = BoundaryGeodesic(fps[0], fps[1])
    orbit = enumerate_orbit(presentation, origin(presentation.model), search_depth)
    elliptics = [el.map for el in orbit.elements if classify(el.map) is MapClass.ELLIPTIC]
    z = geo.apex
    for step in range(100):
        if not any(hyperbolic_distance(z, geometry.apply_interior(e, z)) < 1e-9 for e in elliptics):
            return z
        z = geo.point_at(0.1 * (step + 1))
    raise InternalError("no elliptic-free point found along the axis after 100 steps")


@dataclass
class PackingRadius:
    """Half the smallest orbit displacement, shrunk by a safety factor.

    Hyperbolic balls of this radius about distinct orbit points of the
    fully enumerated group are pairwise disjoint; at a finite search depth
    that statement is checkable only for the enumerated elements, so the
    depth travels with the value.
    """

    radius: float
    min_displacement: float
    safety_factor: float
    search_depth: int


def packing_radius(orbit, safety_factor=0.98):
    """Packing radius from the smallest nontrivial orbit displacement."""
    disp = orbit.displacements[orbit.word_lengths > 0]
    if disp.size == 0:
        raise UsageError("orbit has no nontrivial elements")
    min_disp = float(disp.min())
    if min_disp < 1e-9:
        raise DegenerateBasepointError(
            f"basepoint is fixed by a nontrivial element (displacement {min_disp:.3g})"
        )
    return PackingRadius(
        radius=0.5 * safety_factor * min_disp,
        min_displacement=min_disp,
        safety_factor=safety_factor,
        search_depth=orbit.max_word_length,
    )


@dataclass
class PackingCheck:
    """Outcome of the pairwise ball-disjointness oracle."""

    ok: bool
    pair: tuple | None = None
    distance: float | None = None


def check_packing_disjoint(orbit, radius, chunk=256):
    """Verify d(g_i z, g_j z) > 2*radius for all pairs of orbit points.

    Brute force over pairs in enumeration order, chunked so the distance
    matrix never materializes whole.  Returns the first violating pair of
    element indices when the balls are not disjoint.
    """
    pts = orbit.points
    n = pts.shape[0]
    if n < 2:
        return PackingCheck(ok=True)
    qa = orbit.gaps_squared()
    thresh = math.cosh(2.0 * radius)
    for start in range(0, n - 1, chunk):
        stop = min(start + chunk, n - 1)
        block = pts[start:stop]  # rows i, compared against all j > i
        diff = block[:, None, :] - pts[None, :, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        carg = 1.0 + 2.0 * sq / (qa[start:stop, None] * qa[None, :])
        cols = np.arange(n)[None, :]
        rows = np.arange(start, stop)[:, None]
        bad = (carg <= thresh) & (cols > rows)
        if np.any(bad):
            i_loc, j = np.argwhere(bad)[0]
            i = start + int(i_loc)
            j = int(j)
            return PackingCheck(
                ok=False,
                pair=(i, j),
                distance=float(np.arccosh(max(carg[i_loc, j], 1.0))),
            )
    return PackingCheck(ok=True)
