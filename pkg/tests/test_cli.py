import json

import numpy as np
import pytest

from qbist.cli import main
from qbist.fileio import read_sic, write_povm, write_probs, write_sic, write_state
from qbist.representation import state_to_probs
from qbist.sampling import random_density_matrices, random_povm, random_pure_states
from qbist.sic_core import SicSystem

from conftest import get_sic


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_text(out):
    return dict(line.split(" = ", 1) for line in out.splitlines())


def test_build_and_verify_roundtrip(tmp_path, capsys):
    path = tmp_path / "sic3.txt"
    code, out, _ = run(capsys, "build-sic", "--dim", 3, "--t", 0.7, "--out", path)
    assert code == 0 and parse_text(out)["gram.accepted"] == "true"
    code, out, _ = run(capsys, "verify-sic", "--sic", path)
    assert code == 0
    assert parse_text(out)["status"] == "ok"


def test_build_searched(tmp_path, capsys):
    code, out, _ = run(capsys, "build-sic", "--dim", 4, "--seed", 1, "--format", "structured")
    rep = json.loads(out)
    assert code == 0 and rep["source"] == "search" and rep["gram"]["max_offdiag_error"] < 1e-9


def test_verify_corrupted_sic(tmp_path, capsys):
    sic = get_sic(3)
    P = sic.projectors.copy()
    P[4] = P[4] * 0.9 + 0.1 * np.eye(3) / 3
    path = tmp_path / "bad.txt"
    write_sic(path, SicSystem(P))
    code, out, _ = run(capsys, "verify-sic", "--sic", path)
    rep = parse_text(out)
    assert code == 1 and rep["status"] == "fail"
    assert 4 in json.loads(rep["offending_pair"])
    assert float(rep["gram.max_offdiag_error"]) > 1e-3


def test_unparsable_input(tmp_path, capsys):
    path = tmp_path / "junk.txt"
    path.write_text("3\nnot numbers\n")
    code, _, err = run(capsys, "verify-sic", "--sic", path)
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "verify-sic", "--sic", tmp_path / "missing.txt")
    assert code == 2


def test_represent_and_reconstruct(tmp_path, capsys, rng):
    sic = get_sic(3)
    rho = random_density_matrices(3, 1, rng)[0]
    state = tmp_path / "rho.txt"
    write_state(state, rho)
    code, out, _ = run(capsys, "represent", "--dim", 3, "--state", state, "--format", "structured")
    rep = json.loads(out)
    assert code == 0
    np.testing.assert_allclose(rep["probabilities"], state_to_probs(sic, rho), atol=1e-15)
    probs = tmp_path / "p.txt"
    write_probs(probs, rep["probabilities"])
    code, out, _ = run(capsys, "reconstruct", "--dim", 3, "--probs", probs, "--format", "structured")
    m = np.array(json.loads(out)["matrix"])
    assert code == 0
    np.testing.assert_allclose(m[..., 0] + 1j * m[..., 1], rho, atol=1e-12)


def test_reconstruct_nonstate_fails(tmp_path, capsys):
    p = np.zeros(9)
    p[0] = 1.0
    probs = tmp_path / "p.txt"
    write_probs(probs, p)
    code, out, _ = run(capsys, "reconstruct", "--dim", 3, "--probs", probs)
    assert code == 1 and parse_text(out)["is_state"] == "false"


def test_born(tmp_path, capsys, rng):
    rho = random_density_matrices(2, 1, rng)[0]
    F = random_povm(2, 3, rng)
    state, povm = tmp_path / "rho.txt", tmp_path / "F.txt"
    write_state(state, rho)
    write_povm(povm, F)
    code, out, _ = run(capsys, "born", "--dim", 2, "--povm", povm, "--state", state, "--format", "structured")
    rep = json.loads(out)
    assert code == 0
    np.testing.assert_allclose(rep["born"], rep["direct"], atol=1e-12)
    code, _, _ = run(capsys, "born", "--dim", 2, "--povm", povm)
    assert code == 2


def test_geometry(tmp_path, capsys, rng):
    sic = get_sic(3)
    files = []
    for i, rho in enumerate(random_pure_states(3, 3, rng)):
        f = tmp_path / f"p{i}.txt"
        write_probs(f, state_to_probs(sic, rho))
        files.append(f)
    code, out, _ = run(capsys, "geometry", "--probs", *files)
    assert code == 0 and parse_text(out)["consistent"] == "true"
    # two zero-heavy vectors with disjoint supports violate the lower bound
    a, b = np.zeros(9), np.zeros(9)
    a[:3], b[3:6] = 1 / 3, 1 / 3
    write_probs(files[0], a)
    write_probs(files[1], b)
    code, out, _ = run(capsys, "geometry", "--probs", files[0], files[1])
    assert code == 1 and parse_text(out)["lower_violations"] == "[[0, 1]]"
    write_probs(files[2], np.full(4, 0.25))
    code, _, _ = run(capsys, "geometry", "--probs", files[0], files[2])
    assert code == 2


def test_basis(capsys):
    code, out, _ = run(capsys, "basis", "--dim", 2)
    rep = parse_text(out)
    assert code == 0 and rep["zero_bound"] == "1" and rep["max_zero_value"] == "1/3"
    assert float(rep["radius2"]) == pytest.approx(1 / 12)


def test_search_distant(capsys):
    code, out, _ = run(capsys, "search-distant", "--dim", 4)
    assert code == 0 and parse_text(out)["max_clique_size"] == "3"
    code, _, err = run(capsys, "search-distant", "--dim", 7)
    assert code == 3 and "infeasible" in err


def test_search_subspace(capsys):
    code, out, _ = run(capsys, "search-subspace", "--dim", 3, "--size", 3, "--format", "structured")
    assert code == 0 and json.loads(out)["hits"] == 12
    code, _, _ = run(capsys, "search-subspace", "--dim", 3, "--size", 5, "--budget", 10)
    assert code == 3


def test_complement(capsys):
    code, out, _ = run(capsys, "complement", "--dim", 3, "--indices", "0,1")
    assert code == 0 and int(parse_text(out)["zero_count"]) >= 2
    code, _, _ = run(capsys, "complement", "--dim", 3, "--indices", "0,x")
    assert code == 2
    code, _, _ = run(capsys, "complement", "--dim", 3, "--indices", "0,99")
    assert code == 2
    code, out, _ = run(capsys, "complement", "--dim", 3, "--indices", "0,1,2,3")
    assert code == 1 and "error" in parse_text(out)


def test_search_failure_exit(capsys):
    code, _, _ = run(capsys, "build-sic", "--dim", 9)
    assert code == 3


def test_bad_tolerance(capsys):
    with pytest.raises(SystemExit):
        main(["basis", "--dim", "3", "--tol", "-1"])


@pytest.mark.parametrize("claim", ["d2-insphere", "d4-clique"])
def test_reproduce_claim(capsys, claim):
    code, out, _ = run(capsys, "reproduce", "--claim", claim)
    assert code == 0 and parse_text(out)[f"{claim}.status"] == "PASS"
    assert "seconds" not in out


def test_reproduce_list_and_unknown(capsys):
    code, out, _ = run(capsys, "reproduce", "--list", "--format", "structured")
    assert code == 0 and "d4-clique" in json.loads(out)["claims"]
    code, _, _ = run(capsys, "reproduce", "--claim", "nope")
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["build-sic", "--dim", "5", "--seed", "3"],
        ["reproduce", "--claim", "subspace-search"],
        ["search-distant", "--dim", "3", "--format", "structured"],
    ],
)
def test_reports_are_byte_identical(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second and first


def test_written_sic_is_bit_exact(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    run(capsys, "build-sic", "--dim", 4, "--seed", 2, "--out", a)
    run(capsys, "build-sic", "--dim", 4, "--seed", 2, "--out", b)
    assert a.read_bytes() == b.read_bytes()
    assert np.array_equal(read_sic(a).projectors, read_sic(b).projectors)
