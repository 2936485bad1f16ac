import numpy as np
import pytest

from kiimht.cli import main, parse_variant
from kiimht.common import InputError
from kiimht.datagen import Mechanism, MechanismSpec, Noise, PairDataset, export_dataset, generate_scalar
from kiimht.dataio import read_header, read_results
from kiimht.embeddings import Reference
from kiimht.scorers import IgciReference, Method

FAST = ["--iters", "3", "--rank", "3", "--hidden", "4", "--n", "20", "--datasets-per-trial", "2", "--trials", "2"]


def table_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split("\t")
    return [dict(zip(header, ln.split("\t"))) for ln in lines[1:]]


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_variant():
    assert parse_variant("Rw-KIIM-HT-N").reweight is Reference.Gaussian
    assert parse_variant("Rw-KIIM-L").method is Method.KIIM
    assert parse_variant("KIIM-HT").reweight is None
    assert parse_variant("IGCI-N").igci_reference is IgciReference.Gaussian
    assert parse_variant("KCDC-nlambda").kcdc_n_lambda
    with pytest.raises(InputError, match="import-decisions"):
        parse_variant("LiNGAM")
    with pytest.raises(InputError):
        parse_variant("Rw-KCDC-N")


def test_synth_table_and_determinism(capsys, tmp_path):
    argv = ["synth", "--method", "IGCI-U,KCDC,KIIM-HT", "--settings", "ANM1-N,CNM-U", *FAST]
    code, out, _ = run(capsys, argv + ["--records", str(tmp_path / "a.tsv")])
    assert code == 0
    assert out.startswith("# kiimht-table v1\n")
    rows = table_rows(out)
    assert [(r["setting"], r["noise"], r["method"]) for r in rows][:3] == [
        ("ANM-1", "N", "IGCI-U"), ("ANM-1", "N", "KCDC"), ("ANM-1", "N", "KIIM-HT")]
    assert all(r["status"] == "ok" and r["trials"] == "2" for r in rows)
    code2, out2, _ = run(capsys, argv + ["--records", str(tmp_path / "b.tsv")])
    assert out2 == out
    a, b = read_results(tmp_path / "a.tsv"), read_results(tmp_path / "b.tsv")
    assert len(a) == 2 * 2 * 2 * 3
    assert [(r.item, r.decision, r.score_xy, r.score_yx) for r in a] == \
           [(r.item, r.decision, r.score_xy, r.score_yx) for r in b]
    params = read_header(tmp_path / "a.tsv")
    assert params["iters"] == "3" and params["settings"] == "ANM1-N,CNM-U"


def test_synth_single_dataset_is_bernoulli(capsys):
    code, out, _ = run(capsys, ["synth", "--method", "IGCI-U", "--trials", "1", "--datasets-per-trial", "1"])
    rows = table_rows(out)
    assert len(rows) == 10
    assert all(r["mean"] in ("0.00", "100.00") for r in rows)


def test_synth_igci_anm1(capsys):
    code, out, _ = run(capsys, ["synth", "--method", "IGCI-U", "--settings", "ANM1-N,ANM1-U", "--desk-scale"])
    assert all(float(r["mean"]) >= 90 for r in table_rows(out))


def test_synth2d_settings(capsys):
    code, out, _ = run(capsys, ["synth2d", "--method", "IGCI-U", "--trials", "1", "--datasets-per-trial", "1"])
    rows = table_rows(out)
    assert len(rows) == 20 and rows[0]["setting"] == "ANM-1 ANM-2"


def test_synth2d_kiim_ht_anm1_mnm1_uniform(capsys):
    code, out, _ = run(capsys, ["synth2d", "--method", "KIIM-HT", "--settings", "ANM1+MNM1-U", "--desk-scale"])
    (row,) = table_rows(out)
    assert float(row["mean"]) >= 90


def test_lambda_sweep_rows(capsys):
    code, out, _ = run(capsys, ["lambda-sweep", "--suite", "scalar", "--settings", "ANM1-U",
                                "--method", "KCDC", "--kcdc-n-lambda", *FAST])
    rows = table_rows(out)
    kcdc = [r for r in rows if r["method"] == "KCDC"]
    assert [float(r["lambda"]) for r in kcdc] == [1e-3, 1e-2, 1e-1, 1.0, 5.0, 10.0, 50.0]
    assert len([r for r in rows if r["method"] == "KCDC-nlambda"]) == 7
    code, out, _ = run(capsys, ["lambda-sweep", "--suite", "scalar", "--settings", "ANM1-U",
                                "--method", "KCDC", "--lambda", "0.5,2", *FAST])
    assert [r["lambda"] for r in table_rows(out)] == ["0.5", "2.0"]


def test_hypergrid_cells(capsys):
    code, out, _ = run(capsys, ["hypergrid", "--settings", "ANM2-N", "--iters", "2", "--n", "10",
                                "--datasets-per-trial", "1", "--trials", "1", "--hidden", "3"])
    rows = table_rows(out)
    cells = [r for r in rows if r["status"] != "summary"]
    assert len(cells) == 25
    assert {(r["rank"], float(r["lambda_reg"])) for r in cells} == {
        (str(a), b) for a in (5, 10, 20, 80, 100) for b in (1e-4, 1e-3, 1e-2, 1e-1, 1.0)}
    (summary,) = [r for r in rows if r["status"] == "summary"]
    means = [float(r["mean"]) for r in cells]
    assert float(summary["mean"]) == pytest.approx(np.mean(means), abs=0.01)


def write_tcep(root):
    rng = np.random.default_rng(0)
    meta = []
    for i in range(1, 4):
        x = rng.standard_normal(30)
        y = x**3 + x + rng.standard_normal(30)
        (root / f"pair{i:04d}.txt").write_text("\n".join(f"{a} {b}" for a, b in zip(x, y)) + "\n")
        meta.append(f"{i:04d} 1 1 2 2 {i}")
    (root / "pair0004.txt").write_text("\n".join(f"{v} 1.0" for v in range(30)) + "\n")  # constant effect
    meta.append("0004 1 1 2 2 1")
    (root / "pairmeta.txt").write_text("\n".join(meta) + "\n")


def test_tcep_counts_failures_and_imports(capsys, tmp_path):
    write_tcep(tmp_path)
    dec = tmp_path / "ext.tsv"
    dec.write_text("ANM\t0001\tXtoY\nANM\t0002\tYtoX\n")
    code, out, _ = run(capsys, ["tcep", "--tcep-dir", str(tmp_path), "--method", "IGCI-U", "--trials", "1",
                                "--import-decisions", str(dec)])
    assert code == 3
    rows = {r["method"]: r for r in table_rows(out)}
    assert rows["IGCI-U"]["pairs"] == "4"
    assert "counted wrong" in rows["IGCI-U"]["status"]
    assert float(rows["IGCI-U"]["mean"]) <= 75.0
    assert rows["ANM"]["mean"] == "25.00"
    assert "2 pairs missing" in rows["ANM"]["status"]


def test_tcep_rejects_lingam(capsys, tmp_path):
    write_tcep(tmp_path)
    code, _, err = run(capsys, ["tcep", "--tcep-dir", str(tmp_path), "--method", "LiNGAM"])
    assert code == 4 and "--import-decisions" in err


def test_tcep_missing_dir(capsys):
    code, _, err = run(capsys, ["tcep"])
    assert code == 4


def test_out_and_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("KIIMHT_OUTPUT_DIR", str(tmp_path / "env"))
    argv = ["synth", "--method", "IGCI-U", "--settings", "ANM1-N", "--trials", "1", "--datasets-per-trial", "1"]
    _, out, _ = run(capsys, argv)
    assert (tmp_path / "env" / "synth.tsv").read_text() == out
    _, out, _ = run(capsys, argv + ["--out", str(tmp_path / "x.tsv")])
    assert (tmp_path / "x.tsv").read_text() == out


def test_unknown_setting(capsys):
    code, _, err = run(capsys, ["synth", "--settings", "FOO-N"])
    assert code == 4 and "FOO-N" in err


def test_infer_anm1_exit_zero(capsys, tmp_path):
    ds = generate_scalar(MechanismSpec(Mechanism.ANM1, Noise.StdNormal, 100, 0))
    path = tmp_path / "anm1.txt"
    np.savetxt(path, np.hstack([ds.x, ds.y]))
    code, out, _ = run(capsys, ["infer", str(path)])
    assert code == 0
    fields = dict(line.split("\t") for line in out.splitlines())
    assert fields["decision"] == "XtoY"
    assert float(fields["score_xy"]) < float(fields["score_yx"])
    assert len(fields["cfg_digest"]) == 16
    swapped = tmp_path / "swapped.txt"
    np.savetxt(swapped, np.hstack([ds.y, ds.x]))
    assert run(capsys, ["infer", str(swapped)])[0] == 1


def test_infer_identity_igci_undecided(capsys, tmp_path):
    x = np.random.default_rng(1).standard_normal(20)
    path = tmp_path / "same.txt"
    np.savetxt(path, np.column_stack([x, x]))
    assert run(capsys, ["infer", str(path), "--method", "IGCI-U"])[0] == 2


def test_infer_column_header_and_selection(capsys, tmp_path):
    rng = np.random.default_rng(2)
    ds = PairDataset(rng.standard_normal((8, 2)), rng.standard_normal((8, 2)))
    path = tmp_path / "d.txt"
    export_dataset(ds, path)
    code, out, _ = run(capsys, ["infer", str(path), "--method", "KCDC"])
    assert code in (0, 1, 2)
    wide = tmp_path / "w.txt"
    np.savetxt(wide, rng.standard_normal((8, 3)))
    assert run(capsys, ["infer", str(wide), "--method", "KCDC"])[0] == 4
    assert run(capsys, ["infer", str(wide), "--method", "KCDC", "--x-cols", "1", "--y-cols", "3"])[0] in (0, 1, 2)
    assert run(capsys, ["infer", str(wide), "--method", "KCDC", "--x-cols", "1", "--y-cols", "7"])[0] == 4


def test_infer_errors(capsys, tmp_path):
    code, _, err = run(capsys, ["infer", str(tmp_path / "nope.txt")])
    assert code > 2 and "no such file" in err
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\n3 x\n")
    code, _, err = run(capsys, ["infer", str(bad)])
    assert code == 4 and "bad.txt:2" in err
    const = tmp_path / "const.txt"
    np.savetxt(const, np.column_stack([np.arange(5.0), np.ones(5)]))
    code, _, err = run(capsys, ["infer", str(const), "--method", "KCDC"])
    assert code == 5 and "constant" in err
    assert run(capsys, ["infer", str(const), "--method", "KCDC,KIIM"])[0] == 4
