import dataclasses
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from faultloc import csvio, table1_config
from faultloc.cli import main


def _case(tmp_path, name="case.ini", **sim):
    c = table1_config()
    if sim:
        c = dataclasses.replace(c, sim=dataclasses.replace(c.sim, **sim))
    path = tmp_path / name
    path.write_text(c.to_ini())
    return str(path)


@pytest.fixture(scope="module")
def synth_csv(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    cfg = _case(d)
    out = d / "synth.csv"
    assert main(["simulate", "--config", cfg, "--mode", "synth", "--out", str(out)]) == 0
    return cfg, out


def test_seed_config(capsys):
    assert main(["--seed-config", "table1"]) == 0
    text = capsys.readouterr().out
    assert "[line]" in text and "ell_true" in text


def test_version_and_help(capsys):
    assert main(["--version"]) == 0
    assert main([]) == 2
    assert main(["bogus"]) == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "faultloc", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()


def test_simulate_synth(synth_csv, cfg):
    _, out = synth_csv
    w, meta = csvio.read_waveform(out)
    assert len(w) == 8192
    assert float(meta["ell_true"]) == 2000.0 and meta["mode"] == "synth"
    y = np.abs(w.samples).max(axis=1)
    quiet = int((cfg.fault.t_f - cfg.line.transit_time(2000.0) - 6.5 * cfg.fault.sigma) / cfg.sim.T_s)
    assert quiet > 3000
    assert y[:quiet].max() <= 1e-9 * y.max()
    manifest = json.loads((out.parent / (out.name + ".manifest.json")).read_text())
    assert manifest["subcommand"] == "simulate"
    assert manifest["parameters"]["sim"]["ell_true"] == 2000.0


def test_simulate_is_reproducible(synth_csv, tmp_path):
    cfg, out = synth_csv
    again = tmp_path / "again.csv"
    assert main(["simulate", "--config", cfg, "--mode", "synth", "--out", str(again)]) == 0
    assert again.read_bytes() == out.read_bytes()


def test_replay(synth_csv, tmp_path):
    _, out = synth_csv
    manifest = out.parent / (out.name + ".manifest.json")
    before = out.read_bytes()
    assert main(["--replay", str(manifest)]) == 0
    assert out.read_bytes() == before
    assert main(["--replay", str(tmp_path / "missing.json")]) == 2


def test_simulate_pde_small(tmp_path):
    cfg = _case(tmp_path, n_samples=1024, ell_true=300.0, spatial_nodes=32)
    c = table1_config()
    # pulse must fit in the short record
    text = open(cfg).read().replace(f"t_f = {c.fault.t_f!r}", "t_f = 0.0015")
    assert "t_f = 0.0015" in text
    open(cfg, "w").write(text)
    out = tmp_path / "pde.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    w, meta = csvio.read_waveform(out)
    assert meta["mode"] == "pde" and len(w) == 1024


def test_bad_spatial_nodes(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(table1_config().to_ini().replace("spatial_nodes = 256", "spatial_nodes = 8"))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2


def test_short_record_is_validation_error(tmp_path):
    cfg = _case(tmp_path, n_samples=2048)
    assert main(["simulate", "--config", cfg, "--mode", "synth", "--out", str(tmp_path / "x.csv")]) == 2


def test_divergence_exit_code(tmp_path):
    cfg = _case(tmp_path, ell_true=20000.0, spatial_nodes=16, substeps=1)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 3


def test_spectrum(synth_csv, tmp_path, synth_spec):
    _, wave = synth_csv
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--waveform", str(wave), "--out", str(out)]) == 0
    rows, meta = csvio.read_table(out, csvio.SPECTRUM_COLUMNS)
    assert rows.shape == (4097, 3) and int(meta["N"]) == 4096
    np.testing.assert_allclose(rows[:, 1:].T, synth_spec.mags, rtol=1e-12)


def test_truncated_waveform(tmp_path, synth_csv):
    cfg, wave = synth_csv
    bad = tmp_path / "trunc.csv"
    bad.write_text("\n".join(wave.read_text().splitlines()[:3]) + "\n")
    assert main(["locate", "--config", cfg, "--waveform", str(bad), "--out", str(tmp_path / "r.json")]) == 2
    assert main(["spectrum", "--waveform", str(bad), "--out", str(tmp_path / "s.csv")]) == 2
    garbled = tmp_path / "garbled.csv"
    garbled.write_text(wave.read_text().replace("\n", "\n1,2\n", 1))
    assert main(["spectrum", "--waveform", str(garbled), "--out", str(tmp_path / "s.csv")]) == 2


def test_sampling_mismatch(tmp_path, synth_csv):
    _, wave = synth_csv
    cfg = _case(tmp_path, T_s=2e-6)
    assert main(["sweep", "--config", cfg, "--waveform", str(wave), "--out", str(tmp_path / "j.csv")]) == 2


def test_tf(tmp_path, synth_csv, sys1):
    cfg, _ = synth_csv
    out = tmp_path / "tf.csv"
    assert main(["tf", "--config", cfg, "--ell", "1000,2000", "--out", str(out)]) == 0
    for ell in (1000, 2000):
        rows, meta = csvio.read_table(tmp_path / f"tf_ell{ell}.csv", ["omega_rad_s", "mag_h1", "mag_h2", "re_h1", "im_h1", "re_h2", "im_h2"])
        assert rows[0, 0] == 0.0 and rows[-1, 0] == pytest.approx(1e6)
        assert rows[0, 2] == pytest.approx(1.0, rel=0.05)
        np.testing.assert_allclose(np.hypot(rows[:, 3], rows[:, 4]), rows[:, 1], rtol=1e-12)
    assert main(["tf", "--config", cfg, "--ell", "", "--out", str(out)]) == 2
    assert main(["tf", "--config", cfg, "--ell", "1,x", "--out", str(out)]) == 2


def test_sweep(tmp_path, synth_csv):
    cfg, wave = synth_csv
    out = tmp_path / "j.csv"
    args = ["sweep", "--config", cfg, "--waveform", str(wave), "--out", str(out)]
    assert main(args + ["--ell-min", "1500", "--ell-max", "2500", "--ell-step", "50", "--threads", "2"]) == 0
    rows, _ = csvio.read_table(out, ["ell_m", "J"])
    assert rows.shape == (21, 2)
    assert rows[np.argmin(rows[:, 1]), 0] == 2000.0
    assert main(args + ["--ell-min", "10", "--ell-max", "0"]) == 2
    assert main(args + ["--ell-step", "0"]) == 2
    assert main(args + ["--omega-cut", "1e9"]) == 2


def test_locate(tmp_path, synth_csv):
    cfg, wave = synth_csv
    out = tmp_path / "r.json"
    base = ["locate", "--config", cfg, "--waveform", str(wave), "--out", str(out)]
    assert main(base) == 0
    r = json.loads(out.read_text())
    assert abs(r["ell_hat_m"] - 2000.0) <= 0.01
    assert r["converged"] is True and r["flat_curve"] is False
    assert r["omega_cut_rad_s"] == pytest.approx(1e6)
    assert main(base + ["--init-ell", "1"]) == 0
    assert abs(json.loads(out.read_text())["ell_hat_m"] - 2000.0) <= 0.01


def test_locate_not_converged(tmp_path, synth_csv):
    cfg, wave = synth_csv
    out = tmp_path / "r.json"
    code = main(["locate", "--config", cfg, "--waveform", str(wave), "--out", str(out), "--init-ell", "1", "--max-evals", "8"])
    assert code == 4
    r = json.loads(out.read_text())
    assert r["converged"] is False and r["ell_hat_m"] >= 0


def test_locate_ignores_ground_truth_header(tmp_path, synth_csv):
    cfg, wave = synth_csv
    lied = tmp_path / "lied.csv"
    text = wave.read_text()
    assert "# ell_true = 2000\n" in text
    lied.write_text(text.replace("# ell_true = 2000", "# ell_true = 50"))
    out = tmp_path / "r.json"
    assert main(["locate", "--config", cfg, "--waveform", str(lied), "--out", str(out)]) == 0
    assert abs(json.loads(out.read_text())["ell_hat_m"] - 2000.0) <= 0.01


def test_advise(tmp_path, synth_csv):
    cfg, _ = synth_csv
    out = tmp_path / "a.json"
    assert main(["advise", "--config", cfg, "--ell-min", "2000", "--out", str(out)]) == 0
    a = json.loads(out.read_text())
    assert a["omega_b_rad_s"] == pytest.approx(100 * a["omega_star_rad_s"])
    assert a["T_s_s"] == pytest.approx(math.pi / a["omega_b_rad_s"])
    assert main(["advise", "--config", cfg, "--ell-min", "-1", "--out", str(out)]) == 2
