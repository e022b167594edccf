from registry import register_relaxation
from relaxations.relaxation import Relaxation


@register_relaxation("drop")
class DropRelaxation(Relaxation):
    """
    Over-approximates every nonlinear constraint by true; linear ones pass through.
    """

    def __init__(self):
        super(DropRelaxation, self).__init__()
        self.name = "DropRelaxation"
        self.lifts_products = False
