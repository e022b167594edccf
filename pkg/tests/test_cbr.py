import json
import os

import matplotlib

matplotlib.use("Agg")

import pytest  # noqa: E402

import cbr  # noqa: E402
import ui  # noqa: E402
from constants import EXIT_EXHAUSTED, EXIT_FOUND, EXIT_INPUT_ERROR  # noqa: E402
from exceptions import TranslationError  # noqa: E402
from linear import LinearConstraint  # noqa: E402

from conftest import PROGRAMS  # noqa: E402


def program_path(name):
    return os.path.join(PROGRAMS, name)


def test_solve_json(capsys):
    code = cbr.main(["solve", program_path("branches.cbr"), "--target", "h", "--format", "json", "--quiet"])
    assert code == EXIT_FOUND
    answer = json.loads(capsys.readouterr().out)
    assert answer["status"] == "found"
    assert answer["witness"] == {"x": -2, "y": 5}
    assert "invariants" not in answer


def test_solve_text_with_invariants(capsys):
    code = cbr.main(["solve", program_path("counter.cbr"), "--target", "c", "--dump-invariants", "--quiet"])
    assert code == EXIT_FOUND
    out = capsys.readouterr().out
    assert "witness: x=0" in out
    assert "loop a (depth 0)" in out


def test_solve_unreachable(capsys):
    code = cbr.main(["solve", program_path("below.cbr"), "--target", "g", "--quiet"])
    assert code == EXIT_EXHAUSTED
    assert "exhausted" in capsys.readouterr().out


def test_input_errors(tmp_path, capsys):
    assert cbr.main(["solve", str(tmp_path / "missing.cbr"), "--target", "a", "--quiet"]) == EXIT_INPUT_ERROR
    bad = tmp_path / "bad.cbr"
    bad.write_text("fn g(x: int in [0, 1]) { y = ; }")
    assert cbr.main(["solve", str(bad), "--target", "a", "--quiet"]) == EXIT_INPUT_ERROR
    assert cbr.main(["solve", program_path("f.cbr"), "--target", "c", "--quiet"]) == EXIT_INPUT_ERROR
    assert "error:" in capsys.readouterr().err


def test_cover(capsys):
    assert cbr.main(["cover", program_path("branches.cbr"), "--quiet"]) == EXIT_FOUND
    out = capsys.readouterr().out
    assert out.count("found") == 7


def test_cover_skips_loop_bodies(f_program):
    assert cbr.loop_body_labels(f_program) == {"c", "d"}


def test_make_config():
    args = cbr.get_args(["solve", "f.cbr", "--target", "f", "--consistency", "poly", "--join", "hull", "--seed", "3"])
    config = cbr.make_config(args)
    assert (config.consistency, config.join, config.seed) == ("poly", "hull", 3)


def test_loop_fixpoints(counter_program):
    w, t_set, z_set, p, q = ui.loop_fixpoints(counter_program, "a")
    assert t_set.variables == ("x_in", "x_out")
    assert len(t_set) == 7
    assert len(z_set) == 4
    assert all(LinearConstraint.ge("x_out", 2).satisfied_by(v) for v in z_set.valuations())
    plot = ui.LoopPlot(w, t_set, z_set, p, q)
    assert plot.pairs(z_set, "x") == [(0, 2), (1, 2), (2, 2), (3, 3)]


def test_loop_fixpoints_rejects_locals(nested_program):
    with pytest.raises(TranslationError):
        ui.loop_fixpoints(nested_program, "c")
    with pytest.raises(TranslationError):
        ui.loop_fixpoints(nested_program, "t")


def test_plot_saves_figure(tmp_path):
    target = tmp_path / "plots" / "counter.png"
    code = cbr.main(["plot", program_path("counter.cbr"), "--loop", "a", "--save", str(target), "--quiet"])
    assert code == EXIT_FOUND
    assert target.exists()
