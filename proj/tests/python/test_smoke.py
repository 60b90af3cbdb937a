import math

import numpy as np
import pytest

import camgeom as cg


def test_projection_and_back_projection():
    k = cg.Intrinsics(500.0, 520.0, 320.0, 240.0, 640, 480)
    u, v = cg.project([0.2, -0.1, 2.0], k)
    assert u == pytest.approx(500.0 * 0.1 + 320.0)
    assert v == pytest.approx(520.0 * -0.05 + 240.0)
    d = cg.back_project(u, v, k)
    assert np.allclose(d, np.array([0.2, -0.1, 2.0]) / math.sqrt(0.04 + 0.01 + 4.0))


def test_resize_updates_intrinsics_and_preserves_rays():
    k = cg.Intrinsics(500.0, 500.0, 320.0, 240.0, 640, 480)
    t = cg.PixelTransform.resize(0.5, 640, 480)
    k2 = cg.apply_transform(k, t)
    assert (k2.fx, k2.cx, k2.width) == (250.0, 160.0, 320)
    assert cg.ray_deviation(k, t, k2) < 1e-12
    assert cg.ray_deviation(k, t, k) > 1e-2
    back = cg.compose(t, cg.invert(t))
    assert back.sx == pytest.approx(1.0) and back.du == pytest.approx(0.0)


def test_camera_embedding_shape_and_bounds():
    k = cg.Intrinsics(500.0, 500.0, 112.0, 112.0, 224, 224)
    e = cg.camera_embedding(k, patch=14, dim=64)
    assert e.shape == (16, 16, 64)
    assert np.all(np.abs(e) <= 1.0)


def test_unproject_round_trip():
    k = cg.Intrinsics(100.0, 100.0, 4.0, 3.0, 8, 6)
    depth = np.full((6, 8), 2.0)
    depth[0, 0] = np.nan
    pts = cg.unproject(depth, k)
    assert pts.shape == (6, 8, 3)
    assert np.isnan(pts[0, 0]).all()
    x, y, z = pts[2, 5]
    assert z == 2.0
    u, v = cg.project([x, y, z], k)
    assert (u, v) == pytest.approx((5.5, 2.5), abs=1e-9)


def test_iou_and_scoring():
    box = [0, 0, 3, 1, 1, 1, 0, 0, 0]
    shifted = [0.5, 0, 3, 1, 1, 1, 0, 0, 0]
    assert cg.iou3d(box, box) == pytest.approx(1.0)
    assert cg.iou3d(box, shifted, "axis_aligned") == pytest.approx(1.0 / 3.0)
    report = cg.evaluate([{"label": "chair", "bbox_3d": box}],
                         [{"label": "chair", "bbox_3d": shifted}], iou=0.25)
    assert report["micro"]["f1"] == pytest.approx(100.0)


def test_parse_recovers_truncated_output():
    text = '```json\n[\n {"label": "lamp", "bbox_3d": [0, 0, 2, 0.3, 0.5, 0.3, 0, 0, 0]},\n …\n]\n```'
    dets, warnings = cg.parse_detections(text)
    assert [d["label"] for d in dets] == ["lamp"]
    assert warnings


def test_errors_are_typed():
    with pytest.raises(cg.CamgeomError):
        cg.Intrinsics(-1.0, 1.0, 0.0, 0.0, 4, 4)


def test_cli_version():
    code, out, _ = cg.run_cli(["version"])
    assert code == 0 and out.startswith("camgeom ")
