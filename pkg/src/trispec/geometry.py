"""Planar triangles and the scale functionals used to normalize their spectra.

Dirichlet eigenvalues scale like 1/length^2, so every inequality in this
package is stated for a scale-invariant product: eigenvalue times squared
diameter, squared perimeter, or area.  This module holds the triangle types,
those functionals, and the closed-form facts (Polya-type bounds, rectangle
spectra) that the verification routines compare against.
"""

import json
import math

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "Triangle",
    "FanTriangle",
    "IsoscelesAperture",
    "ScaleFunctionals",
    "AffineMap",
    "EQUILATERAL_APEX",
    "diameter",
    "scale_functionals",
    "tau_map",
    "subequilateral_hull",
    "polya_upper",
    "classical_lower",
    "rectangle_eigen",
    "rectangle_minimizers",
    "triangle_to_json",
    "triangle_from_json",
]

# Apex height of the equilateral member of the fan family T(0, b).
EQUILATERAL_APEX = math.sqrt(3.0)

# |signed area| below this multiple of diameter^2 counts as degenerate.
DEGENERACY_RTOL = 1e-14


class Triangle:
    """Nondegenerate planar triangle given by its three vertices.

    Vertices are stored as a (3, 2) float array.  Side i is the side
    opposite vertex i, and the interior angle at vertex i is the angle
    between the two sides meeting there.
    """

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.shape != (3, 2):
            raise ValueError(f"expected three planar vertices, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        self.vertices = v
        d = self.diameter
        if d == 0.0 or abs(self.signed_area) < DEGENERACY_RTOL * d * d:
            raise ValueError("degenerate triangle: area too small relative to diameter^2")

    def __repr__(self):
        return f"Triangle({self.vertices.tolist()})"

    @property
    def signed_area(self):
        """Half the cross product of two edge vectors; sign gives orientation."""
        (x1, y1), (x2, y2), (x3, y3) = self.vertices
        return 0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1))

    @property
    def area(self):
        return abs(self.signed_area)

    @property
    def side_lengths(self):
        """Array of side lengths; entry i is the side opposite vertex i."""
        v = self.vertices
        return np.array([
            np.linalg.norm(v[1] - v[2]),
            np.linalg.norm(v[2] - v[0]),
            np.linalg.norm(v[0] - v[1]),
        ])

    @property
    def perimeter(self):
        return float(self.side_lengths.sum())

    @property
    def diameter(self):
        """Largest pairwise vertex distance (the longest side)."""
        v = self.vertices
        return max(
            float(np.linalg.norm(v[i] - v[j]))
            for i, j in ((0, 1), (1, 2), (2, 0))
        )

    @property
    def angles(self):
        """Interior angles; entry i is the angle at vertex i."""
        v = self.vertices
        out = np.empty(3)
        for i in range(3):
            e1 = v[(i + 1) % 3] - v[i]
            e2 = v[(i + 2) % 3] - v[i]
            cross = e1[0] * e2[1] - e1[1] * e2[0]
            out[i] = math.atan2(abs(cross), float(np.dot(e1, e2)))
        return out

    def scaled(self, s):
        """Similar triangle with all lengths multiplied by s > 0."""
        if s <= 0:
            raise ValueError("scale factor must be positive")
        return Triangle(self.vertices * s)

    def contains(self, points, tol=1e-12):
        """True where each query point lies in the closed triangle.

        Containment is decided by barycentric coordinates with slack tol
        relative to the triangle scale, so boundary points count as inside.
        """
        p = np.atleast_2d(np.asarray(points, dtype=float))
        a, b, c = self.vertices
        m = np.column_stack((b - a, c - a))
        uv = np.linalg.solve(m, (p - a).T).T
        u, v = uv[:, 0], uv[:, 1]
        ok = (u >= -tol) & (v >= -tol) & (u + v <= 1.0 + tol)
        return ok if ok.size > 1 else bool(ok[0])


class FanTriangle:
    """Triangle with base corners (-1, 0) and (1, 0) and apex (a, b), b > 0.

    The one-parameter family a = 0, b > sqrt(3) consists of the subequilateral
    isosceles triangles; b = sqrt(3) is equilateral with diameter 2.
    """

    def __init__(self, a, b):
        if not (b > 0):
            raise ValueError("apex height b must be positive")
        self.a = float(a)
        self.b = float(b)

    def __repr__(self):
        return f"FanTriangle(a={self.a!r}, b={self.b!r})"

    @property
    def triangle(self):
        return Triangle([(-1.0, 0.0), (1.0, 0.0), (self.a, self.b)])

    @property
    def is_subequilateral(self):
        return self.a == 0.0 and self.b > EQUILATERAL_APEX

    @property
    def diameter_squared(self):
        """Squared diameter; for the isosceles family with b >= sqrt(3) it is 1 + b^2."""
        d = self.triangle.diameter
        return d * d


class IsoscelesAperture:
    """Isosceles triangle with apex angle alpha and equal sides of length l.

    Realized with apex at the origin and the axis of symmetry along the
    positive x axis, so the symmetric half is the right triangle above
    that axis.
    """

    def __init__(self, alpha, l=1.0):
        if not (0.0 < alpha < math.pi):
            raise ValueError("aperture must lie in (0, pi)")
        if not (l > 0):
            raise ValueError("side length must be positive")
        self.alpha = float(alpha)
        self.l = float(l)

    def __repr__(self):
        return f"IsoscelesAperture(alpha={self.alpha!r}, l={self.l!r})"

    @property
    def triangle(self):
        c = self.l * math.cos(self.alpha / 2.0)
        s = self.l * math.sin(self.alpha / 2.0)
        return Triangle([(0.0, 0.0), (c, -s), (c, s)])

    @property
    def half_triangle(self):
        """Upper half; the symmetry line is the side from (0,0) to (c,0)."""
        c = self.l * math.cos(self.alpha / 2.0)
        s = self.l * math.sin(self.alpha / 2.0)
        return Triangle([(0.0, 0.0), (c, 0.0), (c, s)])

    @property
    def functionals(self):
        a = self.alpha
        area = 0.5 * self.l**2 * math.sin(a)
        perim = 2.0 * self.l * (1.0 + math.sin(a / 2.0))
        # The equal sides dominate up to aperture pi/3, the base beyond.
        diam = self.l if a <= math.pi / 3.0 else 2.0 * self.l * math.sin(a / 2.0)
        return ScaleFunctionals(area, perim, diam)


class ScaleFunctionals:
    """Area, perimeter and diameter of a domain, bundled."""

    __slots__ = ("area", "perimeter", "diameter")

    def __init__(self, area, perimeter, diameter):
        self.area = float(area)
        self.perimeter = float(perimeter)
        self.diameter = float(diameter)

    def __iter__(self):
        return iter((self.area, self.perimeter, self.diameter))

    def __repr__(self):
        return (f"ScaleFunctionals(area={self.area!r}, "
                f"perimeter={self.perimeter!r}, diameter={self.diameter!r})")


def diameter(t):
    """Diameter of a Triangle (largest pairwise vertex distance)."""
    return t.diameter


def scale_functionals(t):
    """ScaleFunctionals(area, perimeter, diameter) of a Triangle."""
    return ScaleFunctionals(t.area, t.perimeter, t.diameter)


class AffineMap:
    """Affine map x -> M x + shift acting on points or point arrays."""

    def __init__(self, matrix, shift=(0.0, 0.0)):
        self.matrix = np.asarray(matrix, dtype=float).reshape(2, 2)
        self.shift = np.asarray(shift, dtype=float).reshape(2)
        if abs(np.linalg.det(self.matrix)) < 1e-300:
            raise ValueError("affine map must be invertible")

    def __call__(self, points):
        p = np.asarray(points, dtype=float)
        return p @ self.matrix.T + self.shift

    def inverse(self):
        inv = np.linalg.inv(self.matrix)
        return AffineMap(inv, -inv @ self.shift)


def tau_map(a, b, c, d):
    """Affine map fixing the base corners and sending apex (c, d) to (a, b).

    This is the linear interpolation map between fan triangles: it carries
    T(c, d) onto T(a, b) and is the change of variables behind the trial
    function transplantation estimates.  Requires b > 0 and d > 0.
    """
    if not (b > 0 and d > 0):
        raise ValueError("apex heights must be positive")
    return AffineMap([[1.0, (a - c) / d], [0.0, b / d]])


def subequilateral_hull(t):
    """Isosceles subequilateral triangle containing a congruent copy of t.

    Let beta be the interior angle between the two longest sides of t (the
    angle opposite the shortest side; ties resolve by vertex order and never
    change the angle).  Extending the second-longest side to the length of
    the longest yields an isosceles triangle with aperture beta <= pi/3 and
    the same diameter as t.  Normalized to base (-1, 0), (1, 0) this is the
    fan triangle T(0, b) with b = cot(beta/2) >= sqrt(3), with equality
    exactly for equilateral input.
    """
    i = int(np.argmin(t.side_lengths))
    beta = float(t.angles[i])
    b = 1.0 / math.tan(beta / 2.0)
    return FanTriangle(0.0, b)


def polya_upper(t):
    """Polya-type upper bound on the fundamental tone: pi^2/3 * sum(l_i^2) / A^2."""
    l2 = float(np.sum(t.side_lengths**2))
    return (math.pi**2 / 3.0) * l2 / t.area**2


def classical_lower(t):
    """Classical lower bounds on the fundamental tone, as a dict.

    'polya_szego' is the sharp area bound 4 pi^2 / (sqrt(3) A) among
    triangles, attained by the equilateral; 'makai' is the sharp bound
    pi^2 L^2 / (16 A^2) in terms of area and perimeter.
    """
    area = t.area
    perim = t.perimeter
    return {
        "polya_szego": 4.0 * math.pi**2 / (math.sqrt(3.0) * area),
        "makai": math.pi**2 * perim**2 / (16.0 * area**2),
    }


def rectangle_eigen(phi, p=1, q=1):
    """Mode (p, q) of the unit-diameter rectangle with sides cos(phi), sin(phi).

    Requires 0 < phi <= pi/4, so the x side is the longer one and the
    second eigenvalue is the (2, 1) mode.
    """
    if not (0.0 < phi <= math.pi / 4.0):
        raise ValueError("phi must lie in (0, pi/4]")
    if p < 1 or q < 1:
        raise ValueError("mode indices must be >= 1")
    c, s = math.cos(phi), math.sin(phi)
    return math.pi**2 * (p**2 / c**2 + q**2 / s**2)


def rectangle_minimizers():
    """Diameter-normalized rectangle minimizers of lambda_2 and lambda_1 + lambda_2.

    Minimizes over the aspect angle phi in (0, pi/4].  Both minimizers are
    interior (strictly below pi/4), so the square minimizes neither lambda_2
    nor lambda_1 + lambda_2 among rectangles of given diameter.  Returns a
    dict with the argmin and value for each.
    """
    def lam2(phi):
        return rectangle_eigen(phi, 2, 1)

    def lam12(phi):
        return rectangle_eigen(phi, 1, 1) + rectangle_eigen(phi, 2, 1)

    out = {}
    for name, f in (("lambda2", lam2), ("lambda12", lam12)):
        res = minimize_scalar(f, bounds=(1e-6, math.pi / 4.0), method="bounded",
                              options={"xatol": 1e-12})
        out[name] = {"phi": float(res.x), "value": float(res.fun)}
    return out


def triangle_to_json(t):
    """Serialize a Triangle as a JSON array of three [x, y] pairs."""
    return json.dumps(t.vertices.tolist())


def triangle_from_json(text):
    """Inverse of triangle_to_json; validates shape and nondegeneracy."""
    return Triangle(json.loads(text))
