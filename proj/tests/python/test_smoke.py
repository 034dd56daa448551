import json
import os
import subprocess

import numpy as np
import pytest

import ecgd


def small_signal():
    spec = ecgd.SignalSpec()
    spec.duration_s = 4.5
    return ecgd.gen_signal(spec)


def test_grayscale_and_threshold():
    img = np.zeros((1, 3, 3), dtype=np.uint8)
    img[0, 0] = (255, 0, 0)
    img[0, 1] = (255, 255, 255)
    gray = ecgd.to_grayscale(img)
    assert gray.tolist() == [[76, 255, 0]]
    mask = ecgd.binarize_fixed(gray, 100)
    assert mask.tolist() == [[True, False, True]]


def test_png_round_trip():
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, size=(7, 11, 3), dtype=np.uint8)
    assert np.array_equal(ecgd.decode_image(ecgd.encode_png(img)), img)


def test_truncated_png_raises():
    data = ecgd.encode_png(np.full((8, 8, 3), 90, dtype=np.uint8))
    with pytest.raises(ecgd.EcgdError) as info:
        ecgd.decode_image(data[: len(data) // 2])
    assert info.value.code == "decode"


def test_otsu_examples():
    gray = np.array([[10] * 50 + [200] * 50], dtype=np.uint8)
    assert ecgd.otsu_threshold(gray) == (10, False)
    assert ecgd.otsu_threshold(np.full((3, 3), 77, dtype=np.uint8)) == (77, True)


def test_viterbi_and_fill():
    trace = ecgd.viterbi_trace([[10.0], [12.0], [10.0, 14.0]])
    assert trace.y == [10.0, 12.0, 14.0]
    assert ecgd.column_nodes(np.array([[True], [True], [False], [True]])) == [[0.5, 3.0]]


def test_grid_estimate():
    mask = np.zeros((60, 100), dtype=bool)
    mask[:, [0, 40, 80]] = True
    lines = ecgd.detect_lines(mask)
    assert lines.verticals == pytest.approx([0, 40, 80])
    grid = ecgd.estimate_grid(lines)
    assert grid.width_pixels == 40 and grid.square_assumed


def test_metrics():
    a = ecgd.DigitalSignal(100.0, [0.0, 1.0, 2.0])
    b = ecgd.DigitalSignal(100.0, [0.0, 2.0, 2.0])
    assert ecgd.mse(b, a) == pytest.approx(1 / 3, abs=1e-12)
    with pytest.raises(ecgd.EcgdError) as info:
        ecgd.pearson(ecgd.DigitalSignal(100.0, [1.0, 1.0, 1.0]), a)
    assert info.value.code == "undefined-correlation"


def test_round_trip_through_the_pipeline():
    sig = small_signal()
    render = ecgd.rasterize(sig, ecgd.RenderSpec())
    pred, grid = ecgd.digitize_mask(render["mask"], render["image"])
    assert abs(grid.width_pixels - 40) <= 1
    report = ecgd.evaluate(pred, sig)
    assert report.pearson >= 0.99
    assert report.mse <= 1e-3


def test_raw_pipeline_reports_stage_on_failure():
    cfg = ecgd.PipelineConfig()
    cfg.grid_px = 40.0
    with pytest.raises(ecgd.EcgdError) as info:
        ecgd.digitize_mask(np.zeros((50, 80), dtype=bool), None, cfg)
    assert info.value.stage == "trace"


def test_cli_module_entry(tmp_path):
    out = tmp_path / "corpus"
    assert ecgd.cli(["synth", "--out", str(out), "--n-clean", "1", "--n-overlap", "1", "--seed", "3"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert [s["id"] for s in manifest["samples"]] == ["clean_0000", "overlap_0000"]


@pytest.mark.skipif("ECGD_CLI" not in os.environ, reason="command-line tool path not provided")
def test_cli_binary(tmp_path):
    tool = os.environ["ECGD_CLI"]
    corpus, pred = tmp_path / "c", tmp_path / "p"
    subprocess.run([tool, "synth", "--out", str(corpus), "--n-clean", "2", "--n-overlap", "0"], check=True)
    subprocess.run([tool, "digitize", "--input", str(corpus), "--out", str(pred), "--mode", "mask"], check=True)
    res = subprocess.run([tool, "evaluate", "--pred", str(pred), "--ref", str(corpus)],
                         check=True, capture_output=True, text=True)
    assert res.stdout.splitlines()[0] == "id,group,mse,pearson,lag,iou"
    assert res.stdout.count("no-overlap") == 3
