import numpy as np
import pytest

from bgskit.model import (
    CropSpec,
    ForegroundMask,
    MultiChannelImage,
    SampleTriplet,
    validate_triplet,
)

from conftest import random_triplet


def test_well_formed_triplet_validates(rng):
    assert validate_triplet(random_triplet(rng, 240, 320, 4)) == []
    assert validate_triplet(random_triplet(rng, 16, 16, 3)) == []


def test_mismatched_label_width_is_reported(rng):
    t = random_triplet(rng, 16, 16)
    bad = SampleTriplet(
        empty=t.empty,
        recent=t.recent,
        current=t.current,
        label=ForegroundMask(np.zeros((16, 12), dtype=np.float32)),
    )
    assert "label width != image width" in validate_triplet(bad)


def test_out_of_range_value_is_reported(rng):
    t = random_triplet(rng, 8, 8)
    data = t.current.data.copy()
    data[0, 0, 0] = 1.5
    bad = SampleTriplet(t.empty, t.recent, MultiChannelImage(data), t.label)
    assert "current value out of [0,1]" in validate_triplet(bad)


def test_nan_counts_as_out_of_range(rng):
    t = random_triplet(rng, 8, 8)
    data = t.empty.data.copy()
    data[3, 3, 1] = np.nan
    bad = SampleTriplet(MultiChannelImage(data), t.recent, t.current, t.label)
    violations = validate_triplet(bad)
    assert "empty value out of [0,1]" in violations


def test_bad_channel_count_is_reported(rng):
    img5 = MultiChannelImage(np.zeros((8, 8, 5), dtype=np.float32))
    t = SampleTriplet(img5, img5, img5, ForegroundMask(np.zeros((8, 8), dtype=np.float32)))
    violations = validate_triplet(t)
    assert any("not in (3, 4)" in v for v in violations)


def test_nonbinary_label_is_reported(rng):
    t = random_triplet(rng, 8, 8)
    label = t.label.data.copy()
    label[0, 0] = 0.5
    bad = SampleTriplet(t.empty, t.recent, t.current, ForegroundMask(label))
    assert "label value not in {0,1}" in validate_triplet(bad)


def test_multiple_violations_reported_together(rng):
    t = random_triplet(rng, 8, 8)
    data = t.current.data.copy()
    data[0, 0, 0] = -0.1
    bad = SampleTriplet(
        t.empty,
        t.recent,
        MultiChannelImage(data),
        ForegroundMask(np.zeros((4, 4), dtype=np.float32)),
    )
    violations = validate_triplet(bad)
    assert len(violations) >= 3


def test_images_are_immutable_after_construction(rng):
    t = random_triplet(rng, 8, 8)
    with pytest.raises(ValueError):
        t.current.data[0, 0, 0] = 0.0
    with pytest.raises(ValueError):
        t.label.data[0, 0] = 1.0


def test_image_requires_three_dimensions():
    with pytest.raises(ValueError):
        MultiChannelImage(np.zeros((8, 8), dtype=np.float32))
    with pytest.raises(ValueError):
        ForegroundMask(np.zeros((8, 8, 3), dtype=np.float32))


def test_crop_spec_rejects_nonpositive_extents():
    with pytest.raises(ValueError):
        CropSpec(10, 10, 0, 4)
    with pytest.raises(ValueError):
        CropSpec(10, 10, 4, -1)


def test_crop_spec_window_arithmetic():
    spec = CropSpec(10, 10, 4, 4)
    assert spec.row_bounds() == (8, 12)
    assert spec.col_bounds() == (8, 12)
    spec = CropSpec(10, 10, 5, 5)
    assert spec.row_bounds() == (8, 13)
    spec = CropSpec(50, 50, 100, 100)
    assert spec.row_bounds() == (0, 100)
