import math

import numpy as np
import pytest

import egoseg


def test_segmentation_round_trip():
    s = egoseg.Segmentation(10, [0, 4, 7])
    assert s.boundaries == [4, 7]
    assert egoseg.Segmentation.from_json(s.to_json()) == s
    assert egoseg.Segmentation.from_labels([1, 1, 2, 2, 1]).starts == [0, 2, 4]
    with pytest.raises(egoseg.ValidationError):
        egoseg.Segmentation(10, [0, 4, 4])
    with pytest.raises(ValueError):
        egoseg.Segmentation(10, [1, 4])


def test_metrics():
    a = egoseg.Segmentation(4, [0, 2])
    b = egoseg.Segmentation(4, [0, 3])
    assert egoseg.gce(a, b) == 0.25
    assert egoseg.lce(a, b) == 0.125
    r = egoseg.f_measure(egoseg.Segmentation(200, [0, 105]), egoseg.Segmentation(200, [0, 100]))
    assert r["tp"] == 1 and r["fmeasure"] == 1.0
    r = egoseg.evaluate(egoseg.Segmentation(200, [0, 106]), egoseg.Segmentation(200, [0, 100]))
    assert (r["tp"], r["fp"], r["fn"]) == (0, 1, 1)


def test_numeric_primitives():
    out = egoseg.signed_root_normalize([4.0, 0.0, -4.0])
    assert out == pytest.approx([1 / math.sqrt(2), 0.0, -1 / math.sqrt(2)])
    assert egoseg.cut_threshold(1, 2, 8.0, 0.1) == pytest.approx(math.sqrt(math.log(40) / 16))
    assert egoseg.pairwise_energy([1, 0], [0, 1]) == pytest.approx(math.exp(-1))
    assert egoseg.cosine_distance([1, 0], [-1, 0]) == 2.0
    r = egoseg.rescale_to_unit(np.array([[-1.0, 3.0], [0.0, 3.0], [1.0, 3.0]]))
    np.testing.assert_allclose(r, [[0, 0.5], [0.5, 0.5], [1, 0.5]])
    kept_values, kept = egoseg.prune_low_variance(np.array([[0.3, 0.0], [0.3, 1.0]]), 0.05)
    assert kept == [1] and kept_values.shape == (2, 1)


def test_detectors():
    x = np.concatenate([np.full((100, 1), 0.1), np.full((100, 1), 0.9)])
    x += 0.05 * np.sin(0.7 * np.arange(200) + 0.3)[:, None]
    seg = egoseg.detect_changes(x, delta=0.1)
    assert len(seg.boundaries) == 1 and abs(seg.boundaries[0] - 100) <= 5

    f = np.array([[1, 0]] * 3 + [[0, 1]] * 3, dtype=float)
    assert egoseg.cluster_frames(f, "single", 0.5).starts == [0, 3]
    merges = egoseg.agglomerate(np.array([[0, 1, 4], [1, 0, 2], [4, 2, 0]], dtype=float), "single")
    assert merges == [(0, 1, 1.0, 2), (0, 2, 2.0, 3)]
    assert len(egoseg.LINKAGES) == 7


def test_pipeline_on_clean_synth():
    data = egoseg.synth(segments=5, length=30, dim=32, concepts=4, noise=0.0, seed=3)
    assert data["features"].shape == (150, 32)
    result = egoseg.run_pipeline(data["features"], data["detections"], data["similarity"])
    assert result["segmentation"] == data["gt"]
    assert egoseg.f_measure(result["segmentation"], data["gt"])["fmeasure"] == 1.0

    contextual_only = egoseg.run_pipeline(data["features"], config={"use_semantic": False})
    assert contextual_only["fused"].shape[1] == 32


def test_pipeline_errors():
    data = egoseg.synth(segments=2, length=10, dim=4, seed=1)
    with pytest.raises(egoseg.ValidationError, match="detections"):
        egoseg.run_pipeline(data["features"], data["detections"][:-1], data["similarity"])
    with pytest.raises(egoseg.ValidationError):
        egoseg.run_pipeline(data["features"], config={"gc": {"omega1": 2.0}})
