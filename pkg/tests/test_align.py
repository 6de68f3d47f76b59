import pytest

from gazemap.align import (
    AlignmentPolicy,
    FrameTimeline,
    frame_timestamp,
    gaze_at_frame,
    load_metadata,
    save_metadata,
    to_pixel,
)
from gazemap.errors import FormatError, GazemapError

TL = FrameTimeline(fps=25.0, frame_count=703, t0_us=0, resolution=(1920, 1080))


def test_frame_timestamp_basics():
    assert frame_timestamp(TL, 0) == 0
    assert frame_timestamp(TL, 1) == 40_000
    assert frame_timestamp(TL, 7) == 280_000  # 7 frames at 25 fps = 280 ms


def test_frame_timestamp_strictly_increasing():
    ts = [frame_timestamp(TL, i) for i in range(TL.frame_count)]
    assert all(b > a for a, b in zip(ts, ts[1:]))


def test_frame_timestamp_out_of_range():
    with pytest.raises(GazemapError):
        frame_timestamp(TL, -1)
    with pytest.raises(GazemapError):
        frame_timestamp(TL, 703)


def hz100_track(n):
    return [(10_000 * i, (0.5, 0.5)) for i in range(n)]


def test_exact_sample_selected():
    track = hz100_track(10)
    assert gaze_at_frame(track, 40_000) == (0.5, 0.5)


def test_gapless_track_staleness_bound():
    track = hz100_track(2811)
    ts_list = [t for t, _ in track]
    for i in range(TL.frame_count):
        fts = frame_timestamp(TL, i)
        assert gaze_at_frame(track, fts) is not None
        nearest = min(abs(t - fts) for t in ts_list)
        assert nearest <= 5_000


def test_dropout_gives_none():
    # 100 ms hole around the frame timestamp
    track = [(t, (0.5, 0.5)) for t in [0, 10_000, 120_000, 130_000]]
    assert gaze_at_frame(track, 60_000) is None


def test_tie_breaks_toward_earlier_sample():
    track = [(30_000, (0.1, 0.1)), (50_000, (0.9, 0.9))]
    assert gaze_at_frame(track, 40_000) == (0.1, 0.1)


def test_far_sample_never_changes_result():
    track = [(40_000, (0.5, 0.5))]
    with_noise = [(40_000, (0.5, 0.5)), (9_000_000, (0.1, 0.1))]
    assert gaze_at_frame(track, 40_000) == gaze_at_frame(with_noise, 40_000)


def test_to_pixel_center():
    assert to_pixel((0.5, 0.5), (1920, 1080)) == (960, 540)


def test_to_pixel_clamps_at_boundary():
    assert to_pixel((1.0, 1.0), (1920, 1080)) == (1919, 1079)
    assert to_pixel((0.0, 0.0), (1920, 1080)) == (0, 0)


def test_to_pixel_matches_published_coordinates():
    # tolerance reflects unknown rounding in the published pixel values
    x, y = to_pixel((0.5536, 0.5583), (1920, 1080))
    assert abs(x - 1063) <= 1
    assert abs(y - 603) <= 1


def test_to_pixel_never_leaves_bounds():
    for gp in [(-0.2, 0.5), (0.5, 1.3), (2.0, -1.0)]:
        x, y = to_pixel(gp, (100, 80))
        assert 0 <= x < 100 and 0 <= y < 80


def test_policy_validation():
    with pytest.raises(GazemapError):
        AlignmentPolicy(max_staleness_us=0)
    with pytest.raises(GazemapError):
        AlignmentPolicy(mode="interpolate")


def test_metadata_round_trip(tmp_path):
    path = tmp_path / "meta.json"
    save_metadata(TL, path)
    assert load_metadata(path) == TL


def test_metadata_rejects_bad_fps(tmp_path):
    path = tmp_path / "meta.json"
    path.write_text('{"fps":0,"frame_count":1,"t0_us":0,"resolution":[10,10]}')
    with pytest.raises(FormatError):
        load_metadata(path)
