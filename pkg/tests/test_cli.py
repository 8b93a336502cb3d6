import json

import pytest

from artifact.cli import CACHE_ENV, main
from artifact.complexes import gc0B_complex


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_graphs_enumerate(capsys):
    code, out, _ = run(capsys, "graphs", "enumerate", "--genus", "2")
    assert code == 0
    data = json.loads(out)
    assert data["count"] == 6 and data["schema"] == "v1"


def test_genus_one_is_usage_error(capsys):
    code, _, err = run(capsys, "graphs", "enumerate", "--genus", "1")
    assert code == 2 and "genus" in err


def test_gc_homology_csv(capsys):
    code, out, err = run(capsys, "gc", "homology", "--genus", "3", "--variant", "gc0", "--check-d2")
    assert code == 0
    assert out == "degree,rank\n5,0\n6,1\n"
    assert "d^2 = 0" in err


def test_gc_homology_json_and_dump(capsys, tmp_path):
    dump = tmp_path / "c.json"
    code, out, _ = run(
        capsys, "gc", "homology", "--genus", "3", "--variant", "gc0B", "--format", "json", "--prime", "101", "--dump", str(dump)
    )
    assert code == 0
    over_q = gc0B_complex(3).betti()
    assert json.loads(out)["betti"] == {str(k): v for k, v in over_q.items()}
    assert json.loads(dump.read_text())["schema"] == "v1"


def test_perfect_requires_long_for_genus_five(capsys):
    code, _, err = run(capsys, "perfect", "enumerate", "--g", "5")
    assert code == 2 and "--long" in err


def test_perfect_cache(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    code, out, _ = run(capsys, "perfect", "enumerate", "--g", "3")
    assert code == 0 and json.loads(out)["count"] == 1
    cached = tmp_path / "perfect_g3.json"
    assert cached.exists()
    code, out2, _ = run(capsys, "perfect", "enumerate", "--g", "3")
    assert out2 == out


def test_integrate_requires_seed(capsys):
    code, _, err = run(capsys, "integrate", "--cone", "w3", "--form", "w5", "--n", "1000")
    assert code == 2 and "seed" in err


def test_integrate_thread_invariance(capsys):
    args = ["integrate", "--cone", "w3", "--form", "w5", "--n", "2e4", "--seed", "1"]
    code, out1, _ = run(capsys, *args, "--threads", "1")
    assert code == 0
    code, out2, _ = run(capsys, *args, "--threads", "3")
    a, b = json.loads(out1), json.loads(out2)
    assert (a["value"], a["stderr"]) == (b["value"], b["stderr"])
    assert "ratio_to_zeta3" in a


def test_integrate_from_request_file(capsys, tmp_path):
    req = tmp_path / "req.json"
    req.write_text(json.dumps({"form": "w5", "cone": "q3", "n": 5000, "seed": 2}))
    code, out, _ = run(capsys, "integrate", "--input", str(req))
    assert code == 0 and json.loads(out)["n_samples"] == 5000


def test_integrate_degree_mismatch(capsys):
    code, _, _ = run(capsys, "integrate", "--cone", "w3", "--form", "w9", "--n", "100", "--seed", "1")
    assert code == 2


def test_unknown_cone(capsys):
    code, _, err = run(capsys, "integrate", "--cone", "e8", "--form", "w5", "--n", "100", "--seed", "1")
    assert code == 2 and "unknown cone" in err


def test_torelli(capsys):
    code, out, _ = run(capsys, "torelli", "--graph", "w3")
    data = json.loads(out)
    assert code == 0 and data["injective"] and all(f["matched"] for f in data["faces"])
    code, out, _ = run(capsys, "torelli", "--graph", "dumbbell")
    data = json.loads(out)
    assert code == 0 and not data["injective"] and len(data["kernel"]) == 1


def test_stokes_usage_errors(capsys):
    code, _, err = run(capsys, "stokes", "--g", "4", "--dim", "6", "--n", "100")
    assert code == 2 and "seed" in err
    code, _, err = run(capsys, "stokes", "--g", "4", "--dim", "6", "--n", "100", "--seed", "1", "--face", "9999")
    assert code == 2 and "out of range" in err


def test_bad_sample_count():
    with pytest.raises(SystemExit) as exc:
        main(["integrate", "--cone", "w3", "--form", "w5", "--n", "1.5", "--seed", "1"])
    assert exc.value.code == 2


def test_relative_variant_matches_gc0_in_genus_two(capsys):
    _, rel, _ = run(capsys, "gc", "homology", "--genus", "2", "--variant", "relative")
    _, gc0, _ = run(capsys, "gc", "homology", "--genus", "2", "--variant", "gc0")
    assert rel == gc0


def test_perfect_faces_genus_two_is_a_triangle(capsys):
    code, out, _ = run(capsys, "perfect", "faces", "--g", "2")
    faces = json.loads(out)["cones"][0]["faces"]
    dims = sorted(f["dim"] for f in faces)
    assert code == 0 and dims == [0, 0, 0, 1, 1, 1, 2]
