import io

import pytest

from c2hourglass import cli
from c2hourglass.graphpoly import InternalCheckError


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out)
    return code, out.getvalue()


def test_count_triangle(data_dir):
    code, text = run("count", "--graph", str(data_dir / "triangle.g"), "--q", "3")
    assert code == cli.EXIT_OK
    # first column is the count, second the c2 residue
    assert text.split()[0] == "9"


def test_reduce_golden(data_dir):
    code, text = run("reduce", "--graph", str(data_dir / "k4.g"), "--strategy", "greedy-search")
    assert code == cli.EXIT_OK
    assert text == (data_dir / "k4_reduce.golden").read_text()
    assert text.splitlines()[-2].endswith(": +-1")


def test_c2_kernel_csv():
    code, text = run("c2", "--kernel", "1", "--route", "hourglass-theorem", "--primes", "2,3,5", "--csv")
    assert code == cli.EXIT_OK
    assert text == "q,residue,neg_residue\n2,0,0\n3,2,1\n5,4,1\n"


def test_c2_kernel_4_2():
    code, text = run("c2", "--kernel", "data/kernels/4_2", "--route", "hourglass-theorem",
                     "--primes", "2,3,5,7")
    assert code == cli.EXIT_OK
    assert text.strip() == "0,2,3,2"


def test_output_is_stable(data_dir):
    args = ("count", "--graph", str(data_dir / "k4.g"), "--primes", "2,3,5")
    assert run(*args) == run(*args, "--workers", "2")


def test_kernels_list():
    code, text = run("kernels", "list")
    assert code == cli.EXIT_OK
    assert text.splitlines()[0].startswith("0\tinternal=0")


def test_user_errors(data_dir, tmp_path):
    assert run("count", "--graph", str(tmp_path / "missing.g"), "--q", "3")[0] == cli.EXIT_USER
    assert run("count", "--graph", str(data_dir / "triangle.g"), "--q", "6")[0] == cli.EXIT_USER
    assert run("nonsense")[0] == cli.EXIT_USER
    bad = tmp_path / "bad.g"
    bad.write_text("v 2\ne a 0 7\n")
    assert run("poly", "--graph", str(bad))[0] == cli.EXIT_USER


def test_budget_exit():
    code, _ = run("count", "--poly", "a*b*c*d*e*f*g", "--q", "7", "--budget", "100")
    assert code == cli.EXIT_BUDGET


def test_internal_exit(monkeypatch, data_dir):
    def broken(args, out):
        raise InternalCheckError("forced")

    monkeypatch.setattr(cli, "cmd_poly", broken)
    # the parser binds the handler when it is built, so patching the module attribute is enough
    code, _ = run("poly", "--graph", str(data_dir / "triangle.g"))
    assert code == cli.EXIT_INTERNAL


def test_catalog_label_lists():
    assert cli._catalog_labels("4,1,4,2,0,5,13") == {"4,1", "4,2", "0", "5,13"}
    assert cli._catalog_labels("3;5,3") == {"3", "5,3"}
    with pytest.raises(cli.UserError):
        cli._catalog_labels("9")
