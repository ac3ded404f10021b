import io

import pytest

from grad.cli import run
from grad.corpus import get_program


def _path(name):
    return get_program(name).path


def _run(*argv):
    stdout, stderr = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


@pytest.fixture
def grad_file(tmp_path):
    def write(text):
        filename = tmp_path / "program.grad"
        filename.write_text(text)
        return str(filename)

    return write


class TestCheck:
    def test_polymorphic_identity(self):
        code, out, err = _run("check", _path("poly_id"))
        assert code == 0
        assert out.splitlines() == ["Pi y :1 Unit. Unit", "usage: -"]
        assert err == ""

    def test_usage(self):
        code, out, _ = _run("check", _path("intro_trace"), "--semiring", "nat")
        assert code == 0
        assert out.splitlines() == ["Unit", "usage: x:1, y:1"]

    def test_definitions_only(self, grad_file):
        code, out, _ = _run("check", grad_file("def x : Unit = unit\n"))
        assert code == 0
        assert out.splitlines() == ["x : Unit"]

    def test_type_error(self, grad_file):
        code, _, err = _run("check", grad_file("main : Unit = (unit, unit)\n"))
        assert code == 1
        assert err.startswith("grad:1:")

    def test_unknown_semiring(self):
        code, _, err = _run("check", _path("poly_id"), "--semiring", "nope")
        assert code == 4
        assert err.startswith("grad:4:")

    def test_missing_file(self, tmp_path):
        code, _, err = _run("check", str(tmp_path / "missing.grad"))
        assert code == 4
        assert err.startswith("grad:4:")


class TestEval:
    def test_substitution(self):
        code, out, _ = _run("eval", _path("poly_id"))
        assert code == 0
        assert out.splitlines()[-1] == "steps: 1"

    def test_heap(self):
        code, out, _ = _run("eval", _path("intro_trace"), "--semiring", "nat", "--mode", "heap")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "unit"
        assert "allowed: x:0, y:0, a%1:0, b%2:0" in lines
        assert "consumed: (3, 1, 1, 1)" in lines

    def test_trace(self):
        code, out, _ = _run(
            "eval", _path("intro_trace"), "--semiring", "nat", "--mode", "heap", "--trace"
        )
        assert code == 0
        lines = out.splitlines()
        steps = int(lines[-3].split(": ")[1])
        assert len(lines) == steps + 4
        assert all("⇒^" in line for line in lines[:steps])

    def test_stuck(self):
        code, _, err = _run("eval", _path("stuck"), "--semiring", "nat", "--mode", "heap")
        assert code == 2
        assert err == "grad:2:resource-exhausted x\n"

    def test_stuck_program_still_substitutes(self):
        code, out, _ = _run("eval", _path("stuck"), "--semiring", "nat")
        assert code == 0
        assert out.splitlines()[0] == "unit"

    def test_out_of_fuel(self, grad_file):
        filename = grad_file("main : Unit = (\\x :1 Unit. x) ((\\x :1 Unit. x) unit)\n")
        code, _, err = _run("eval", filename, "--fuel", "1")
        assert code == 3
        assert err.startswith("grad:3:")

    def test_fuel_must_be_positive(self):
        code, _, err = _run("eval", _path("poly_id"), "--fuel", "0")
        assert code == 4
        assert err == "grad:4:usage fuel must be positive\n"


class TestGraph:
    def test_stdout(self):
        code, out, _ = _run("graph", _path("heap_ex"), "--semiring", "nat", "--dot", "-")
        assert code == 0
        assert out.startswith("digraph memory {\n")
        assert '"x2" -> "x1" [label="2"];' in out

    def test_file(self, tmp_path):
        target = tmp_path / "heap.dot"
        code, out, _ = _run("graph", _path("heap_ex"), "--semiring", "nat", "--dot", str(target))
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("digraph memory {\n")

    def test_unwritable(self, tmp_path):
        target = tmp_path / "missing" / "heap.dot"
        code, _, err = _run("graph", _path("heap_ex"), "--semiring", "nat", "--dot", str(target))
        assert code == 4
        assert err.startswith("grad:4:usage cannot write")


class TestProps:
    def test_suite(self):
        code, out, _ = _run("props", "--suite", "gc", "--seed", "3")
        assert code == 0
        assert out.splitlines()[0] == "gc heap_ex holds"

    def test_semiring_filter(self):
        code, out, _ = _run("props", "--suite", "single-pointer", "--semiring", "boolean")
        assert code == 0
        assert out.splitlines() == ["single-pointer boolean-flags holds"]

    def test_unknown_semiring(self):
        code, _, err = _run("props", "--suite", "gc", "--semiring", "nope")
        assert code == 4
        assert err.startswith("grad:4:")


@pytest.mark.parametrize(
    "argv",
    (
        (),
        ("eval",),
        ("run", "x.grad"),
        ("props", "--suite", "nothing"),
        ("eval", "x.grad", "--mode", "lazy"),
    ),
)
def test_usage_errors(argv):
    code, _, err = _run(*argv)
    assert code == 4
    assert err.startswith("grad:4:usage")
