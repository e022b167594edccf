import math

from linear import LinearConstraint, LinearExpression
from registry import register_relaxation
from relaxations.relaxation import Relaxation


def envelope_facets(product, x, y, bx, by) -> list:
    """
    The four products of bound distances, (x - a)(y - c) >= 0 signed per corner,
    with x * y replaced by the product variable. Corners with an infinite
    bound are skipped.
    """
    if bx.is_empty() or by.is_empty():
        return []
    p = LinearExpression.variable(product)
    vx = LinearExpression.variable(x)
    vy = LinearExpression.variable(y)
    facets = []
    for a, sa in ((bx.lo, 1), (bx.hi, -1)):
        for c, sc in ((by.lo, 1), (by.hi, -1)):
            if math.isinf(a) or math.isinf(c):
                continue
            facets.append(LinearConstraint((p - vx * c - vy * a + a * c) * (sa * sc)))
    return facets


@register_relaxation("envelope")
class EnvelopeRelaxation(Relaxation):
    """
    Convex and concave envelope of a bilinear term over the factor box.
    """

    def __init__(self):
        super(EnvelopeRelaxation, self).__init__()
        self.name = "EnvelopeRelaxation"

    def product_facets(self, product, x, y, bounds):
        return envelope_facets(product, x, y, bounds[x], bounds[y])
