import io

import numpy as np
import pytest

from mofs.cli import main
from mofs.core import are_orthogonal, format_square, load_any, parse_square, set_to_json
from mofs.sampling import random_binary_square, random_orthogonal_binary_pair

from conftest import DATA


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def pair_file(tmp_path):
    pair = random_orthogonal_binary_pair(8, np.random.default_rng(3))
    path = tmp_path / "pair.json"
    path.write_text(set_to_json(pair))
    return path, pair


def test_construct_complete_and_verify(capsys, tmp_path):
    out_path = tmp_path / "c.json"
    code, _, err = run(capsys, "construct", "complete", "--q", "2", "--h", "2", "-o", str(out_path))
    assert code == 0 and "9-MOFS(4;2)" in err
    assert load_any(out_path.read_text()).k == 9
    code, out, _ = run(capsys, "verify", "-i", str(out_path))
    assert code == 0 and out.strip() == "VALID 9-MOFS(4;2)"


def test_verify_invalid(capsys):
    code, out, _ = run(capsys, "verify", "-i", str(DATA / "triple4.txt"))
    assert code == 1 and out.startswith("INVALID")


def test_construct_dilate_and_extension(capsys, tmp_path):
    base = tmp_path / "b.json"
    run(capsys, "construct", "complete", "--q", "2", "--h", "2", "-o", str(base))
    code, out, err = run(capsys, "construct", "dilate", "-i", str(base), "--d", "3")
    assert code == 0 and "certificate" in err and load_any(out).n == 12
    code, out, _ = run(capsys, "construct", "circulant-extension", "-i", str(base), "--d", "2")
    assert code == 0 and load_any(out).k == 10


def test_construct_lift(capsys):
    code, out, _ = run(capsys, "construct", "lift", "--matrix", "0,2;2,0", "--d", "2")
    F = parse_square(out)
    assert code == 0 and F.n == 4 and F.is_binary
    assert run(capsys, "construct", "lift", "--matrix", "0,1;1,0", "--d", "2")[0] == 2


def test_construct_usage_errors(capsys):
    assert run(capsys, "construct", "complete", "--q", "2")[0] == 2
    assert run(capsys, "construct", "complete", "--q", "6", "--h", "1")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["construct", "nonsense"])
    assert exc.value.code == 2


def test_mate_methods(capsys, pair_file):
    path, pair = pair_file
    for method in ("exact", "balance"):
        code, out, _ = run(capsys, "mate", "-i", str(path), "--method", method)
        assert code == 0
        F = parse_square(out)
        assert all(are_orthogonal(F, G) for G in pair)
    code, _, err = run(capsys, "mate", "-i", str(path), "--method", "tower")
    assert code == 2 and "requires 96 | n" in err


def test_mate_none_and_budget(capsys):
    code, out, _ = run(capsys, "mate", "-i", str(DATA / "triple4.txt"))
    assert code == 1 and out.strip() == "NO MATE"
    code, out, _ = run(capsys, "mate", "-i", str(DATA / "triple6.txt"), "--node-limit", "5")
    assert code == 3 and out.strip() == "UNDECIDED"


def test_certify_methods(capsys, tmp_path):
    code, out, _ = run(capsys, "certify-max", "-i", str(DATA / "triple4.txt"), "--method", "search")
    assert code == 0 and out.strip() == "MAXIMAL (exhaustive)"
    base = tmp_path / "b.json"
    run(capsys, "construct", "complete", "--q", "2", "--h", "2", "-o", str(base))
    code, out, _ = run(capsys, "certify-max", "-i", str(base), "--method", "bound")
    assert code == 0 and out.startswith("MAXIMAL (complete")
    code, out, _ = run(capsys, "certify-max", "-i", str(base), "--method", "dilation", "--d", "3")
    assert code == 0 and "complete" in out.lower()
    code, out, _ = run(capsys, "certify-max", "-i", str(base), "--method", "relation")
    assert code == 1 and out.startswith("NOT CERTIFIED")
    assert run(capsys, "certify-max", "-i", str(base), "--method", "dilation")[0] == 2


def test_certify_search_mate_exists(capsys, pair_file):
    code, out, _ = run(capsys, "certify-max", "-i", str(pair_file[0]))
    assert code == 1 and out.strip() == "NOT MAXIMAL (mate exists)"


def test_classify_pair(capsys, pair_file):
    code, out, _ = run(capsys, "classify-pair", "-i", str(pair_file[0]), "--r1", "0", "--r2", "1")
    assert code == 0
    assert "A' =" in out and "exception:" in out and "shifts:" in out


def test_relations(capsys, tmp_path):
    path = tmp_path / "c.json"
    run(capsys, "construct", "complete", "--q", "2", "--h", "1", "-o", str(path))
    code, out, err = run(capsys, "relations", "-i", str(path), "--jp")
    assert code == 0 and len(out.strip().splitlines()) == 4 and "4 relations" in err
    code, out, _ = run(capsys, "relations", "-i", str(path))
    assert code == 0 and out.startswith("dimension")


def test_decompose_polytope(capsys):
    code, out, _ = run(capsys, "decompose-polytope", "--m", "2", "--beta", "12", "--x", "6,3,6,3,6")
    rows = [list(map(int, line.split(","))) for line in out.split()]
    assert code == 0 and len(rows) == 2
    assert [sum(c) for c in zip(*rows)] == [6, 3, 6, 3, 6]
    assert run(capsys, "decompose-polytope", "--m", "2", "--beta", "5", "--x", "1,1,1,1,1")[0] == 2


def test_census(capsys):
    code, out, _ = run(capsys, "census", "--n", "4")
    assert code == 0 and "90" in out
    code, out, _ = run(capsys, "census", "--n", "4", "--samples", "3", "--seed", "4")
    assert "3/3" in out


def test_stdin_and_seed_reproducible(capsys, monkeypatch, pair_file):
    text = pair_file[0].read_text()
    outs = []
    for _ in range(2):
        monkeypatch.setattr("sys.stdin", io.StringIO(text))
        outs.append(run(capsys, "mate", "-i", "-", "--method", "balance", "--seed", "9")[1])
    assert outs[0] == outs[1] and outs[0]


def test_square_file_round_trip(capsys, tmp_path):
    F = random_binary_square(6, np.random.default_rng(2), 2)
    path = tmp_path / "f.txt"
    path.write_text(format_square(F))
    out_path = tmp_path / "mate.txt"
    code, _, _ = run(capsys, "mate", "-i", str(path), "-o", str(out_path))
    if code == 0:
        M = parse_square(out_path.read_text())
        assert M.n == 6
    else:
        assert code == 1


def test_certify_bound(capsys, tmp_path):
    path = tmp_path / "c.json"
    run(capsys, "construct", "complete", "--q", "3", "--h", "1", "-o", str(path))
    code, out, _ = run(capsys, "certify-bound", "-i", str(path))
    assert code == 0
    assert out.splitlines() == ["rank 9 of 9 vectors (independent)", "2 squares, bound 2"]
