from __future__ import annotations

import random

import pytest

from litmine.geometry import (
    HORIZONTAL,
    OTHER,
    VERTICAL,
    BBox,
    LineSegment,
    PageModel,
    TextRun,
    crop_region,
)


def rand_box(rng: random.Random) -> BBox:
    x0 = rng.uniform(0, 500)
    y0 = rng.uniform(0, 700)
    return BBox(x0, y0, x0 + rng.uniform(1, 100), y0 + rng.uniform(1, 100))


def test_bbox_rejects_inverted_corners():
    with pytest.raises(ValueError):
        BBox(10, 20, 4, 6)


def test_bbox_measures():
    box = BBox(10, 20, 30, 50)
    assert box.width == 20
    assert box.height == 30
    assert box.area == 600
    assert box.center == (20, 35)


def test_contains_point_boundary_inclusive():
    box = BBox(0, 0, 10, 10)
    assert box.contains_point(0, 0)
    assert box.contains_point(10, 10)
    assert not box.contains_point(10.01, 5)


def test_intersection_area_brute_force():
    # oracle: rasterize on a unit grid and count covered cells
    rng = random.Random(7)
    for _ in range(50):
        ax, ay = rng.randint(0, 30), rng.randint(0, 30)
        bx, by = rng.randint(0, 30), rng.randint(0, 30)
        a = BBox(ax, ay, ax + rng.randint(0, 10), ay + rng.randint(0, 10))
        b = BBox(bx, by, bx + rng.randint(0, 10), by + rng.randint(0, 10))
        cells = sum(
            1
            for x in range(40)
            for y in range(40)
            if a.x0 <= x and x + 1 <= a.x1 and a.y0 <= y and y + 1 <= a.y1
            and b.x0 <= x and x + 1 <= b.x1 and b.y0 <= y and y + 1 <= b.y1
        )
        assert a.intersection_area(b) == pytest.approx(cells)


def test_iou_identical_and_disjoint():
    box = BBox(5, 5, 15, 25)
    assert box.iou(box) == pytest.approx(1.0)
    assert box.iou(BBox(100, 100, 110, 110)) == 0.0


def test_iou_symmetry():
    rng = random.Random(11)
    for _ in range(100):
        a, b = rand_box(rng), rand_box(rng)
        assert a.iou(b) == pytest.approx(b.iou(a))


def test_union_covers_both():
    a = BBox(0, 0, 5, 5)
    b = BBox(3, 8, 20, 9)
    u = a.union(b)
    assert u.as_tuple() == (0, 0, 20, 9)


def test_expanded_and_clamped():
    box = BBox(2, 2, 8, 8).expanded(3)
    assert box.as_tuple() == (-1, -1, 11, 11)
    assert box.clamped(10, 10).as_tuple() == (0, 0, 10, 10)


def test_segment_orientation():
    assert LineSegment(0, 100, 200, 100.4).orientation == HORIZONTAL
    assert LineSegment(50, 0, 50.4, 300).orientation == VERTICAL
    assert LineSegment(0, 0, 100, 100).orientation == OTHER


def test_crop_region_keeps_center_hits_rebased():
    runs = [
        TextRun(text="in", bbox=BBox(10, 10, 20, 18), font_size=8),
        TextRun(text="out", bbox=BBox(200, 200, 220, 208), font_size=8),
    ]
    page = PageModel(page_index=0, width=300, height=300, text_runs=runs)
    cropped = crop_region(page, BBox(5, 5, 100, 100))
    assert [r.text for r in cropped.text_runs] == ["in"]
    assert cropped.text_runs[0].bbox.as_tuple() == (5, 5, 15, 13)


def test_crop_region_rejects_zero_area():
    from litmine.errors import EmptyRegion

    page = PageModel(page_index=0, width=100, height=100)
    with pytest.raises(EmptyRegion):
        crop_region(page, BBox(10, 10, 10, 50))
