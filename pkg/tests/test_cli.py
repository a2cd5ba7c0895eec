import numpy as np
import pytest

from kronsvd.cli import main
from kronsvd.fileio import load_image, read_csv_matrix, save_image
from kronsvd.ksum import psf_kron_sum
from kronsvd.problems import satellite_image, speckle_psf
from kronsvd.serialize import load_any_tsvd, load_kron_sum


def _table(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_decompose_delta(tmp_path, capsys):
    assert main(["decompose", "--psf", "delta:8", "--out", str(tmp_path)]) == 0
    assert "r=1" in capsys.readouterr().out
    assert load_kron_sum(tmp_path).r == 1
    assert "psf: delta:8" in (tmp_path / "config.txt").read_text()


def test_decompose_separable(tmp_path):
    p = np.outer([1.0, 2.0, 4.0, 2.0, 1.0], [1.0, 3.0, 1.0, 0.5, 0.1])
    save_image(tmp_path / "p.csv", p)
    assert main(["decompose", "--psf", str(tmp_path / "p.csv"), "--out", str(tmp_path / "o")]) == 0
    assert load_kron_sum(tmp_path / "o").r == 1
    # keeping a second term exposes the gap
    assert main(["decompose", "--psf", str(tmp_path / "p.csv"), "--tol", "0", "--out", str(tmp_path / "o2")]) == 0
    w = load_kron_sum(tmp_path / "o2").weights
    assert w[1] / w[0] < 1e-12


def test_decompose_speckle_weights_exact(tmp_path):
    assert main(["decompose", "--psf", "speckle:16", "--out", str(tmp_path)]) == 0
    header, rows = _table(tmp_path / "weights.csv")
    assert header == ["index", "weight", "relative"]
    w = np.array([float(r[1]) for r in rows])
    assert w.tobytes() == psf_kron_sum(speckle_psf(16)).weights.tobytes()


def test_decompose_center_flag(tmp_path):
    assert main(["decompose", "--psf", "speckle:8", "--center", "2,3", "--out", str(tmp_path)]) == 0
    assert main(["decompose", "--psf", "speckle:8", "--center", "2;3", "--out", str(tmp_path)]) == 2


def test_tsvd_exact_small(tmp_path):
    assert main(["tsvd", "--psf", "speckle:5", "--k", "25", "--oracle", "--out", str(tmp_path)]) == 0
    header, rows = _table(tmp_path / "sv_error.csv")
    assert header == ["index", "approx", "exact", "rel_error"]
    assert max(float(r[3]) for r in rows) <= 1e-10
    assert load_any_tsvd(tmp_path / "factorization").k == 25


def test_tsvd_reordered_beats_baseline(tmp_path):
    med = {}
    for method in ("reordered", "baseline"):
        out = tmp_path / method
        assert main(["tsvd", "--psf", "motion:16", "--k", "64", "--method", method, "--oracle", "--out", str(out)]) == 0
        _, rows = _table(out / "sv_error.csv")
        med[method] = np.median([float(r[3]) for r in rows[:32]])
    assert med["reordered"] < med["baseline"]


def test_tsvd_from_saved_decomposition(tmp_path):
    assert main(["decompose", "--psf", "atmospheric:8", "--out", str(tmp_path / "ks")]) == 0
    assert main(["tsvd", "--ksum", str(tmp_path / "ks"), "--k", "10", "--out", str(tmp_path / "t")]) == 0
    header, rows = _table(tmp_path / "t" / "singular_values.csv")
    assert header == ["index", "sigma"] and len(rows) == 10


def test_tsvd_missing_decomposition(tmp_path, capsys):
    assert main(["tsvd", "--ksum", str(tmp_path / "none"), "--out", str(tmp_path)]) == 2
    assert "not found" in capsys.readouterr().err


def test_deblur_delta_identity(tmp_path):
    assert main([
        "deblur", "--psf", "delta:8", "--image", "satellite:8", "--noise", "0", "--out", str(tmp_path)
    ]) == 0
    np.testing.assert_allclose(read_csv_matrix(tmp_path / "restored.csv"), satellite_image(8), atol=1e-14)
    assert load_image(tmp_path / "restored.pgm").shape == (8, 8)


def test_deblur_improves_on_data(tmp_path):
    assert main([
        "deblur", "--psf", "speckle:32", "--image", "satellite:32", "--noise", "0.02", "--seed", "1",
        "--k", "600", "--ktrunc", "300", "--filter", "tsvd+tikhonov", "--alpha", "1e-3",
        "--out", str(tmp_path),
    ]) == 0
    _, rows = _table(tmp_path / "error.csv")
    vals = {r[0]: float(r[1]) for r in rows}
    assert vals["restored_rel_error"] < vals["blurred_rel_error"]


@pytest.mark.parametrize("extra", [["--alpha", "-1"], ["--ktrunc", "100"], ["--filter", "tikhonov"]])
def test_deblur_bad_arguments(tmp_path, extra):
    args = ["deblur", "--psf", "delta:8", "--image", "satellite:8", "--out", str(tmp_path)]
    assert main(args + extra) == 2


def test_deblur_image_mismatch(tmp_path):
    assert main(["deblur", "--psf", "delta:8", "--image", "satellite:16", "--out", str(tmp_path)]) == 2


def test_solve_identity_one_iteration(tmp_path):
    assert main([
        "solve", "--psf", "delta:8", "--image", "satellite:8", "--alpha", "0", "--out", str(tmp_path)
    ]) == 0
    header, rows = _table(tmp_path / "report.csv")
    assert header == ["iteration", "residual"]
    assert [r[0] for r in rows] == ["0", "1"]


def test_solve_preconditioning_order(tmp_path):
    its = {}
    for pc in ("none", "reordered"):
        out = tmp_path / pc
        assert main([
            "solve", "--psf", "atmospheric:16", "--image", "satellite:16", "--precond", pc,
            "--k", "200", "--maxit", "2000", "--out", str(out),
        ]) == 0
        _, rows = _table(out / "summary.csv")
        its[pc] = int(dict(rows)["iterations"])
    assert its["reordered"] < its["none"]


def test_solve_maxit_zero(tmp_path):
    args = ["solve", "--psf", "delta:8", "--image", "satellite:8", "--maxit", "0", "--out", str(tmp_path)]
    assert main(args) == 2


def test_bounds_sweep(tmp_path):
    assert main(["bounds", "--psf", "atmospheric:8", "--k", "30", "--out", str(tmp_path)]) == 0
    header, rows = _table(tmp_path / "bounds.csv")
    assert header[:3] == ["k", "true_signal", "signal_bound"]
    assert len(rows) == 30
    flags = [r[header.index("signal_valid")] for r in rows]
    # valid for small effective ranks, invalid once sigma_k is too small
    assert flags[0] == "1" and "0" in flags


def test_bounds_exact_instance(tmp_path):
    p = np.outer([1.0, 3.0, 1.5], [2.0, 1.0, 0.5])
    save_image(tmp_path / "p.csv", p)
    assert main(["bounds", "--psf", str(tmp_path / "p.csv"), "--k", "4", "--out", str(tmp_path / "b")]) == 0
    header, rows = _table(tmp_path / "b" / "bounds.csv")
    for name in ("signal_bound", "noise_bound", "pinv_bound", "sol_bound"):
        assert all(abs(float(r[header.index(name)])) <= 1e-12 for r in rows)


def test_bounds_capacity_refusal(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("KRONSVD_CAP", "100")
    assert main(["bounds", "--psf", "atmospheric:16", "--k", "10", "--out", str(tmp_path)]) == 3
    assert "KRONSVD_CAP" in capsys.readouterr().err


def test_usage_errors(tmp_path):
    assert main([]) == 2
    assert main(["decompose", "--out", str(tmp_path)]) == 2
    assert main(["decompose", "--psf", "nope:8", "--out", str(tmp_path)]) == 2
    assert main(["decompose", "--psf", str(tmp_path / "missing.pgm"), "--out", str(tmp_path)]) == 2
    (tmp_path / "bad.pgm").write_text("P2\n2 2\n255\n1 2 x 4\n")
    assert main(["decompose", "--psf", str(tmp_path / "bad.pgm"), "--out", str(tmp_path)]) == 2


def test_help_lists_flags(capsys):
    assert main(["deblur", "--help"]) == 0
    out = capsys.readouterr().out
    for flag in ("--psf", "--center", "--image", "--noise", "--seed", "--k", "--ktrunc", "--filter", "--alpha", "--method"):
        assert flag in out
