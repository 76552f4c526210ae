import json

import numpy as np
import pytest

from weldmat import (
    AugmentConfig,
    HeatmapParams,
    combined_loss,
    load_raster,
    make_heatmap_gt,
    read_wfr,
    save_raster,
    synth_instance,
    write_wfr,
)
from weldmat.cli import main


@pytest.fixture
def instance(tmp_path):
    image, mask, prob = synth_instance(0)
    paths = {
        "image": tmp_path / "image.png",
        "mask": tmp_path / "mask.png",
        "prob": tmp_path / "prob.wfr",
    }
    save_raster(paths["image"], image)
    save_raster(paths["mask"], mask)
    write_wfr(paths["prob"], prob)
    return paths


class TestHeatmapGt:
    def test_writes_round_trippable_heatmap(self, instance, tmp_path, capsys):
        out = tmp_path / "heat.wfr"
        code = main(["heatmap-gt", "--mask", str(instance["mask"]), "--out", str(out)])
        assert code == 0
        mask = load_raster(instance["mask"], "mask")
        heat = make_heatmap_gt(mask, HeatmapParams())
        # WFR stores float32, so the file equals the float32 view of the result
        assert np.array_equal(read_wfr(out), heat.astype(np.float32).astype(np.float64))
        stdout = capsys.readouterr().out
        assert "sigma" in stdout and "boundary pixels" in stdout

    def test_empty_mask_warns_but_succeeds(self, tmp_path, capsys):
        f = tmp_path / "zero.png"
        save_raster(f, np.zeros((16, 16), np.uint8))
        out = tmp_path / "heat.wfr"
        code = main(["heatmap-gt", "--mask", str(f), "--out", str(out)])
        assert code == 0
        assert "warning" in capsys.readouterr().err
        assert not read_wfr(out).any()

    def test_missing_input_exits_2(self, tmp_path, capsys):
        code = main(["heatmap-gt", "--mask", str(tmp_path / "no.png"), "--out", str(tmp_path / "h.wfr")])
        assert code == 2


class TestRefineCommand:
    def test_default_flags(self, instance, tmp_path):
        out = tmp_path / "refined.png"
        code = main([
            "refine", "--image", str(instance["image"]), "--prob", str(instance["prob"]),
            "--out", str(out), "--trimap-out", str(tmp_path / "tri.png"),
            "--alpha-out", str(tmp_path / "alpha.wfr"),
        ])
        assert code == 0
        mask = load_raster(out, "mask")
        assert mask.any()
        tri = load_raster(tmp_path / "tri.png", "trimap")
        assert (tri == 0.5).any()
        alpha = read_wfr(tmp_path / "alpha.wfr")
        assert alpha.shape == mask.shape

    def test_inverted_thresholds_exit_2(self, instance, tmp_path, capsys):
        code = main([
            "refine", "--image", str(instance["image"]), "--prob", str(instance["prob"]),
            "--out", str(tmp_path / "m.png"), "--c-high", "0.3", "--c-low", "0.4",
        ])
        assert code == 2

    def test_all_unknown_exits_1(self, tmp_path, capsys):
        img = tmp_path / "i.png"
        prob = tmp_path / "p.wfr"
        save_raster(img, np.full((8, 8), 0.5))
        write_wfr(prob, np.full((8, 8), 0.42))
        code = main(["refine", "--image", str(img), "--prob", str(prob), "--out", str(tmp_path / "m.png")])
        assert code == 1
        assert "unknown" in capsys.readouterr().err.lower()

    def test_json_and_bench_output(self, instance, tmp_path, capsys):
        code = main([
            "refine", "--image", str(instance["image"]), "--prob", str(instance["prob"]),
            "--out", str(tmp_path / "m.png"), "--json", "--bench",
        ])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        doc = json.loads(lines[-1])
        assert doc["unknown_pixels"] > 0
        assert "seconds" in doc

    def test_reruns_byte_identical(self, instance, tmp_path):
        args = [
            "refine", "--image", str(instance["image"]), "--prob", str(instance["prob"]),
        ]
        out1 = tmp_path / "a.png"
        out2 = tmp_path / "b.png"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestTrimapCommand:
    def test_counts_and_round_trip(self, instance, tmp_path, capsys):
        out = tmp_path / "tri.png"
        code = main(["trimap", "--prob", str(instance["prob"]), "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        tri = load_raster(out, "trimap")
        assert f"foreground {(tri == 1.0).sum()}" in stdout
        assert f"unknown {(tri == 0.5).sum()}" in stdout


class TestLossCommand:
    def test_matches_library(self, tmp_path, capsys):
        rng = np.random.default_rng(91)
        ps = rng.uniform(0.1, 0.9, (8, 8))
        gs = (rng.random((8, 8)) < 0.5).astype(np.uint8)
        pb = rng.uniform(0.1, 0.9, (8, 8))
        hb = rng.uniform(0.1, 0.9, (8, 8))
        paths = {}
        for name, arr in (("ps", ps), ("gs", gs), ("pb", pb), ("hb", hb)):
            paths[name] = tmp_path / f"{name}.wfr"
            write_wfr(paths[name], arr.astype(np.float64))
        code = main([
            "loss", "--ps", str(paths["ps"]), "--gs", str(paths["gs"]),
            "--pb", str(paths["pb"]), "--hb", str(paths["hb"]), "--json",
            "--grad-ps-out", str(tmp_path / "gps.wfr"),
        ])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        # CLI sees float32-quantized inputs, so compare against the same
        quant = lambda a: a.astype(np.float32).astype(np.float64)
        rep = combined_loss(quant(ps), gs, quant(pb), quant(hb))
        assert doc["focal"] == pytest.approx(rep.focal, rel=1e-12)
        assert doc["combined"] == pytest.approx(rep.combined, rel=1e-12)
        grad = read_wfr(tmp_path / "gps.wfr")
        assert np.abs(grad - rep.grad_ps).max() < 1e-7


class TestEvalCommand:
    def test_report_schema(self, tmp_path):
        pred_dir = tmp_path / "pred"
        gt_dir = tmp_path / "gt"
        pred_dir.mkdir()
        gt_dir.mkdir()
        rng = np.random.default_rng(92)
        for i in range(3):
            gt = (rng.random((12, 12)) < 0.5).astype(np.uint8)
            pred = gt.copy()
            if i:
                pred[0, :i] ^= 1
            save_raster(pred_dir / f"{i}.png", pred)
            save_raster(gt_dir / f"{i}.png", gt)
        report = tmp_path / "report.json"
        code = main(["eval", "--pred-dir", str(pred_dir), "--gt-dir", str(gt_dir),
                     "--report", str(report)])
        assert code == 0
        doc = json.loads(report.read_text())
        assert len(doc["per_image"]) == 3
        assert {"iou_fg", "iou_bg", "miou", "name"} <= set(doc["per_image"][0])
        assert 0.0 <= doc["dataset_miou"] <= 1.0
        assert doc["per_image"][0]["miou"] == 1.0

    def test_no_shared_names_exits_2(self, tmp_path, capsys):
        (tmp_path / "pred").mkdir()
        (tmp_path / "gt").mkdir()
        save_raster(tmp_path / "pred" / "a.png", np.zeros((4, 4), np.uint8))
        save_raster(tmp_path / "gt" / "b.png", np.zeros((4, 4), np.uint8))
        code = main(["eval", "--pred-dir", str(tmp_path / "pred"), "--gt-dir", str(tmp_path / "gt")])
        assert code == 2

    def test_global_aggregate(self, tmp_path):
        pred_dir = tmp_path / "pred"
        gt_dir = tmp_path / "gt"
        pred_dir.mkdir()
        gt_dir.mkdir()
        m = np.zeros((6, 6), np.uint8)
        m[:3] = 1
        save_raster(pred_dir / "x.png", m)
        save_raster(gt_dir / "x.png", m)
        code = main(["eval", "--pred-dir", str(pred_dir), "--gt-dir", str(gt_dir),
                     "--aggregate", "global"])
        assert code == 0


class TestAugmentCommand:
    def test_deterministic_outputs(self, instance, tmp_path):
        out1 = tmp_path / "aug1"
        out2 = tmp_path / "aug2"
        args = ["augment", "--image", str(instance["image"]), "--mask", str(instance["mask"]),
                "--seed", "5"]
        assert main(args + ["--out-dir", str(out1)]) == 0
        assert main(args + ["--out-dir", str(out2)]) == 0
        for name in ("image_aug.png", "mask_aug.png"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        assert set(np.unique(load_raster(out1 / "mask_aug.png", "mask"))) <= {0, 1}

    def test_config_file(self, instance, tmp_path):
        cfg_file = tmp_path / "aug.json"
        cfg_file.write_text(AugmentConfig(seed=1).to_json())
        code = main(["augment", "--image", str(instance["image"]), "--mask", str(instance["mask"]),
                     "--config", str(cfg_file), "--out-dir", str(tmp_path / "out")])
        assert code == 0


class TestSynthCommand:
    def test_writes_deterministic_triples(self, tmp_path):
        out1 = tmp_path / "s1"
        out2 = tmp_path / "s2"
        args = ["synth", "--seed", "7", "--count", "3", "--size", "32"]
        assert main(args + ["--out-dir", str(out1)]) == 0
        assert main(args + ["--out-dir", str(out2)]) == 0
        files = sorted(p.name for p in out1.iterdir())
        assert len(files) == 9
        for name in files:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        prob = read_wfr(out1 / "000_prob.wfr")
        assert prob.min() >= 0.0 and prob.max() <= 1.0

    def test_size_below_16_exits_2(self, tmp_path, capsys):
        code = main(["synth", "--out-dir", str(tmp_path / "s"), "--size", "8"])
        assert code == 2


class TestHelp:
    @pytest.mark.parametrize(
        "cmd", ["heatmap-gt", "loss", "trimap", "refine", "eval", "augment", "synth"]
    )
    def test_help_exits_zero(self, cmd, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main([cmd, "--help"])
        assert excinfo.value.code == 0
        assert "--" in capsys.readouterr().out
