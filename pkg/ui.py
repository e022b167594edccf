## Loop fixpoint pictures
import logging
from pathlib import Path

import matplotlib.pyplot as plt

from constants import *
from exceptions import TranslationError
from language import While, used_variables
from lattices import Box, Interval, TupleSet
from loops import (
    MemoryState,
    WConstraint,
    abstract_fixpoint,
    concrete_fixpoint,
    initial_polyhedron,
    project_solutions,
)
from polyhedra import alpha_box, poly_integer_points, poly_intersect, poly_project
from relaxations.corner import monotone_chain

logger = logging.getLogger(__name__)


def loop_fixpoints(program, label, widen_delay=WIDEN_DELAY, join="template"):
    """
    Concrete and abstract fixpoints of the loop labelled label, started from the
    declared ranges of the parameters.

    Parameters
    ----------
    program : Program
    label : str
        A while loop whose state variables are all parameters.
    widen_delay : int
    join : str

    Returns
    -------
    (WConstraint, TupleSet, TupleSet, Polyhedron, Polyhedron)
        The loop, T, Z_w, P and Q; the state of variable v is named v_in before
        the loop and v_out after it.
    """
    loop = program.find(label)
    if not isinstance(loop, While):
        raise TranslationError(f"'{label}' does not label a while loop")
    names = sorted(used_variables([loop]))
    free = sorted(set(names) - set(program.param_names))
    if free:
        raise TranslationError(f"loop '{label}' uses non-parameter variables {free}")
    m1 = MemoryState({v: f"{v}_in" for v in names})
    m3 = MemoryState({v: f"{v}_out" for v in names})
    w = WConstraint(m1, m3, loop.cond, loop.body, label=label)
    box1 = Box({m1[v]: Interval(program.param(v).lo, program.param(v).hi) for v in names})
    t_set, z_set = concrete_fixpoint(w, TupleSet.from_box(box1))
    p = abstract_fixpoint(w, initial_polyhedron(w, box1), widen_delay, mode=join)
    q = project_solutions(w, p)
    return w, t_set, z_set, p, q


class LoopPlot:
    def __init__(self, w, t_set, z_set, p, q):
        self.w = w
        self.t_set = t_set
        self.z_set = z_set
        self.p = p
        self.q = q
        plt.figure()

    def pairs(self, s, var):
        """(in, out) pairs of var in the tuple set s."""
        i = s.variables.index(self.w.m1[var])
        o = s.variables.index(self.w.m3[var])
        return sorted({(t[i], t[o]) for t in s.tuples})

    def plot_pairs(self, var):
        pairs = self.pairs(self.t_set, var)
        exits = set(self.pairs(self.z_set, var))
        inner = [pt for pt in pairs if pt not in exits]
        if inner:
            plt.scatter(*zip(*inner), color=CONCRETE_COLOR, zorder=3, label="T")
        if exits:
            plt.scatter(*zip(*sorted(exits)), color=EXIT_COLOR, zorder=4, label="Z_w")
        return pairs

    def plot_polyhedron(self, var, lo, hi):
        """Integer hull of P projected on (var in, var out), clipped to [lo, hi]^2."""
        x, y = self.w.m1[var], self.w.m3[var]
        plane = poly_project(self.p, [x, y])
        clipped = poly_intersect(plane, alpha_box(Box({x: Interval(lo, hi), y: Interval(lo, hi)})))
        vertices = monotone_chain(poly_integer_points(clipped))
        if len(vertices) >= 3:
            plt.gca().add_patch(plt.Polygon(vertices, closed=True, alpha=0.3, color=POLYHEDRON_COLOR, label="P"))
        elif vertices:
            plt.plot(*zip(*vertices), "-", lw=3, color=POLYHEDRON_COLOR, label="P")

    def render(self, var=None, save_path=None, show=False):
        """
        Draw one state variable of the loop.

        Parameters
        ----------
        var : str, optional
            Program variable, the first state variable by default.
        save_path : str, optional
            File to save the figure to.
        show : bool
            Open an interactive window.
        """
        var = var or self.w.state_variables[0]
        if var not in self.w.m1:
            raise TranslationError(f"'{var}' is not a state variable of loop '{self.w.label}'")
        plt.clf()
        pairs = self.plot_pairs(var)
        values = [v for pt in pairs for v in pt] or [0]
        lo, hi = min(values) - 1, max(values) + 1
        self.plot_polyhedron(var, lo, hi)
        plt.xlim(lo, hi)
        plt.ylim(lo, hi)
        plt.xlabel(f"{var} before the loop")
        plt.ylabel(f"{var} after the loop")
        plt.title(f"loop {self.w.label}: exact and approximated fixpoint")
        plt.legend(loc="upper left")
        if save_path is not None:
            Path(save_path).parent.mkdir(parents=True, exist_ok=True)
            plt.savefig(save_path)
            logger.info(f"saved the plot of loop {self.w.label} to {save_path}")
        if show:
            plt.show()


def plot_loop(program, label, var=None, widen_delay=WIDEN_DELAY, join="template", save_path=None):
    w, t_set, z_set, p, q = loop_fixpoints(program, label, widen_delay, join)
    logger.info(f"loop {label}: |T| = {len(t_set)}, |Z_w| = {len(z_set)}\nP:\n{p}\nQ:\n{q}")
    LoopPlot(w, t_set, z_set, p, q).render(var, save_path, show=save_path is None)
