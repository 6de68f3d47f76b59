import json
from pathlib import Path

import pytest

from gazemap.simulate import Actor, ScenarioSpec, Segment

DATA_DIR = Path(__file__).parent / "data"

H1_CENTER = (300, 300)
H3_CENTER = (1600, 800)
OFF_POINTS = [(200, 900), (1700, 150)]


def reference_trial_spec(seed: int = 7) -> ScenarioSpec:
    """Scenario scripted to 21 minimal H1 fixations, 5 minimal H3 fixations
    and 27 off-target dwells over a 25 fps, 1920x1080 timeline.

    Expected metrics: DT_H1=5880 ms, DT_H2=0, DT_H3=1400 ms, FC=53, TFR=0.49.
    """
    actors = (
        Actor("a_h1", "H1", "rect", (50, 50), H1_CENTER, score=0.9),
        Actor("a_h3", "H3", "rect", (50, 50), H3_CENTER, score=0.85),
        # below the 0.7 score threshold: contributes the H2 class but no hits
        Actor("a_h2", "H2", "rect", (50, 50), (960, 80), score=0.5),
    )

    dwell_order = []
    for _ in range(21):
        dwell_order += ["H1", "off"]
    for _ in range(5):
        dwell_order += ["H3", "off"]
    dwell_order.append("off")
    assert dwell_order.count("H1") == 21
    assert dwell_order.count("H3") == 5
    assert dwell_order.count("off") == 27

    segments = []
    off_idx = 0
    prev_point = None
    for kind in dwell_order:
        if kind == "H1":
            point = H1_CENTER
            seg = Segment(kind="dwell", n_frames=7, target="a_h1")
        elif kind == "H3":
            point = H3_CENTER
            seg = Segment(kind="dwell", n_frames=7, target="a_h3")
        else:
            point = OFF_POINTS[off_idx % 2]
            off_idx += 1
            seg = Segment(kind="dwell", n_frames=7, point=point)
        if prev_point is not None:
            segments.append(
                Segment(kind="saccade", n_frames=3, start=prev_point, end=point)
            )
        segments.append(seg)
        prev_point = point

    return ScenarioSpec(
        seed=seed,
        fps=25.0,
        resolution=(1920, 1080),
        actors=actors,
        gaze_script=tuple(segments),
    )


def spec_to_json(spec: ScenarioSpec) -> dict:
    return {
        "seed": spec.seed,
        "timeline": {
            "fps": spec.fps,
            "resolution": list(spec.resolution),
            "t0_us": spec.t0_us,
        },
        "jitter_px": spec.jitter_px,
        "actors": [
            {
                "id": a.actor_id,
                "label": a.label,
                "shape": a.shape,
                "size": list(a.size),
                "center": list(a.center),
                "velocity": list(a.velocity),
                "score": a.score,
            }
            for a in spec.actors
        ],
        "gaze_script": [
            {
                "kind": s.kind,
                "n_frames": s.n_frames,
                **({"target": s.target} if s.target is not None else {}),
                **({"point": list(s.point)} if s.point is not None else {}),
                **({"from": list(s.start)} if s.start is not None else {}),
                **({"to": list(s.end)} if s.end is not None else {}),
            }
            for s in spec.gaze_script
        ],
    }


@pytest.fixture(scope="session")
def reference_trial_dir(tmp_path_factory):
    """Generated artifacts for the reference (Table-2-style) trial."""
    from gazemap.simulate import generate

    outdir = tmp_path_factory.mktemp("reference_trial")
    spec = reference_trial_spec()
    gt = generate(spec, outdir)
    return outdir, spec, gt


def write_spec_file(spec: ScenarioSpec, path: Path) -> Path:
    path.write_text(json.dumps(spec_to_json(spec)) + "\n", "utf-8")
    return path
