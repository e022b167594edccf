import logging

from constants import CORNER_POINTS
from linear import CONTRADICTION, EQ, LinearConstraint, LinearExpression
from registry import register_relaxation
from relaxations.envelope import EnvelopeRelaxation

logger = logging.getLogger(__name__)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def monotone_chain(points) -> list:
    """Convex hull vertices in counter-clockwise order, collinear points dropped."""
    points = sorted(set(points))
    if len(points) <= 2:
        return points
    lower, upper = [], []
    for p in points:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(points):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def hull_facets(x, y, points) -> list:
    """
    Constraint form of the convex hull of integer points in the (x, y) plane.
    """
    vertices = monotone_chain(points)
    vx = LinearExpression.variable(x)
    vy = LinearExpression.variable(y)
    if not vertices:
        return [CONTRADICTION]
    if len(vertices) == 1:
        (u, v), = vertices
        return [LinearConstraint.eq(vx, u), LinearConstraint.eq(vy, v)]

    def edge(p, q):
        # left of p -> q
        return vy * (q[0] - p[0]) - vx * (q[1] - p[1]) + (q[1] - p[1]) * p[0] - (q[0] - p[0]) * p[1]

    if len(vertices) == 2:
        p, q = vertices
        facets = [LinearConstraint(edge(p, q), EQ)]
        if p[0] != q[0]:
            facets += [LinearConstraint.ge(vx, min(p[0], q[0])), LinearConstraint.le(vx, max(p[0], q[0]))]
        else:
            facets += [LinearConstraint.ge(vy, min(p[1], q[1])), LinearConstraint.le(vy, max(p[1], q[1]))]
        return facets
    return [
        LinearConstraint(edge(p, q))
        for p, q in zip(vertices, vertices[1:] + vertices[:1])
    ]


@register_relaxation("corner")
class CornerRelaxation(EnvelopeRelaxation):
    """
    Envelope plus the integer hull of the factor pairs whose product fits the
    product's bounds, when the factor box is small enough to enumerate.
    """

    def __init__(self):
        super(CornerRelaxation, self).__init__()
        self.name = "CornerRelaxation"

    def product_facets(self, product, x, y, bounds):
        facets = super().product_facets(product, x, y, bounds)
        bx, by, bp = bounds[x], bounds[y], bounds[product]
        if not (bx.is_finite() and by.is_finite()):
            return facets
        if x == y:
            if bx.size() > CORNER_POINTS:
                return facets
            values = [u for u in bx if u * u in bp]
            if not values:
                return facets + [CONTRADICTION]
            vx = LinearExpression.variable(x)
            return facets + [LinearConstraint.ge(vx, min(values)), LinearConstraint.le(vx, max(values))]
        if bx.size() * by.size() > CORNER_POINTS:
            return facets
        points = [(u, v) for u in bx for v in by if u * v in bp]
        hull = hull_facets(x, y, points)
        logger.debug(f"corner hull of {x}*{y} has {len(hull)} facets over {len(points)} points")
        return facets + hull
