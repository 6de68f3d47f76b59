import json

import pytest

from helpers import annotation_doc, primary_validator_exit_code
from maskproducer.cli import main


@pytest.fixture
def annotation_file(tmp_path):
    path = tmp_path / "annotations.json"
    path.write_text(json.dumps(annotation_doc()))
    return path


def test_convert_subcommand(tmp_path, annotation_file):
    out = tmp_path / "masks.json"
    assert main(["convert", "--annotations", str(annotation_file), "--out", str(out), "--quiet"]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["frames"]) == 1
    assert primary_validator_exit_code(out) == 0


def test_convert_bad_input_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    assert main(["convert", "--annotations", str(bad), "--out", str(tmp_path / "o.json"), "--quiet"]) == 2


def test_augment_subcommand_emits_five_docs(tmp_path, annotation_file):
    outdir = tmp_path / "aug"
    assert main(["augment", "--annotations", str(annotation_file), "--outdir", str(outdir), "--quiet"]) == 0
    files = sorted(p.name for p in outdir.iterdir())
    assert len(files) == 5
    assert "frame0_orig.json" in files
    assert "frame0_hflip.json" in files


def test_augmented_docs_convert_and_validate(tmp_path, annotation_file):
    outdir = tmp_path / "aug"
    main(["augment", "--annotations", str(annotation_file), "--outdir", str(outdir), "--quiet"])
    for doc_path in sorted(outdir.iterdir()):
        out = tmp_path / (doc_path.stem + "_masks.json")
        assert main(["convert", "--annotations", str(doc_path), "--out", str(out), "--quiet"]) == 0
        assert primary_validator_exit_code(out) == 0
