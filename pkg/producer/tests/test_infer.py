import numpy as np
import pytest

from helpers import primary_validator_exit_code
from maskproducer.config import ProducerConfig
from maskproducer.errors import InputError, ModelError
from maskproducer.exchange import save_document
from maskproducer.infer import Detection, ThresholdBlobModel, infer_frames, load_model


class StubModel:
    """Pluggable-model seam: replays scripted detections per frame index."""

    def __init__(self, script):
        self.script = script
        self.calls = 0

    def predict(self, image):
        dets = self.script.get(self.calls, [])
        self.calls += 1
        return dets


def blank(w=20, h=15):
    return np.zeros((h, w), dtype=np.uint8)


def machine_frame(w=20, h=15):
    """Fixture image: one bright machine-shaped blob on a dark background."""
    img = np.zeros((h, w), dtype=np.uint8)
    img[4:11, 6:16] = 230   # body
    img[1:4, 12:15] = 230   # cab
    return img


def test_blank_frames_present_with_empty_instances():
    doc = infer_frames(
        [(0, blank()), (1, blank()), (2, blank())],
        ProducerConfig(),
        ThresholdBlobModel(),
    )
    assert [f["frame"] for f in doc["frames"]] == [0, 1, 2]
    assert all(f["instances"] == [] for f in doc["frames"])


def test_machine_fixture_yields_h1_instance(tmp_path):
    doc = infer_frames(
        [(0, machine_frame())], ProducerConfig(), ThresholdBlobModel()
    )
    insts = doc["frames"][0]["instances"]
    assert len(insts) >= 1
    assert all(i["label"] == "H1" for i in insts)
    # canonical RLE: leading zero-run allowed, no empty interior runs
    for inst in insts:
        counts = inst["rle"]["counts"]
        assert all(c > 0 for c in counts[1:])
        assert sum(counts) == 20 * 15
    out = tmp_path / "masks.json"
    save_document(doc, out)
    assert primary_validator_exit_code(out) == 0


def test_score_floor_filters():
    script = {
        0: [
            Detection("machinery", 0.9, np.ones((15, 20), dtype=bool)),
            Detection("machinery", 0.3, np.ones((15, 20), dtype=bool)),
        ]
    }
    doc = infer_frames([(0, blank())], ProducerConfig(score_floor=0.5), StubModel(script))
    insts = doc["frames"][0]["instances"]
    assert len(insts) == 1
    assert insts[0]["score"] == 0.9


def test_unmapped_class_dropped():
    script = {0: [Detection("pedestrian", 0.99, np.ones((15, 20), dtype=bool))]}
    doc = infer_frames([(0, blank())], ProducerConfig(), StubModel(script))
    assert doc["frames"][0]["instances"] == []


def test_class_map_applied():
    script = {
        0: [
            Detection("cable", 0.8, np.ones((15, 20), dtype=bool)),
            Detection("generator", 0.7, np.ones((15, 20), dtype=bool)),
        ]
    }
    doc = infer_frames([(0, blank())], ProducerConfig(), StubModel(script))
    assert [i["label"] for i in doc["frames"][0]["instances"]] == ["H2", "H3"]
    assert set(doc["classes"]) == {"H1", "H2", "H3"}


def test_resolution_mismatch_rejected():
    with pytest.raises(InputError, match="resolution"):
        infer_frames(
            [(0, blank(20, 15)), (1, blank(10, 10))],
            ProducerConfig(),
            ThresholdBlobModel(),
        )


def test_no_frames_rejected():
    with pytest.raises(InputError, match="no frames"):
        infer_frames([], ProducerConfig(), ThresholdBlobModel())


def test_unknown_model_id_rejected():
    with pytest.raises(ModelError, match="unknown"):
        load_model("does_not_exist")


def test_threshold_model_separates_blobs():
    img = blank()
    img[2:5, 2:5] = 255
    img[10:13, 14:18] = 255
    dets = ThresholdBlobModel().predict(img)
    assert len(dets) == 2
    assert {d.class_name for d in dets} == {"machinery"}
