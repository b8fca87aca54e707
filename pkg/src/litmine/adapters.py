"""HTTP clients for optional external services: metadata parsers, region
detectors, and OCR. Every failure degrades; nothing here is fatal except
OCR, whose absence the caller must surface."""

from __future__ import annotations

import httpx

from .errors import OcrClientUnavailable
from .geometry import BBox, PageModel
from .metadata import META_FIELDS, SourceCandidate
from .serde import bbox_to_list


def page_payload(page: PageModel) -> dict:
    """Page geometry in the shape external detectors receive."""
    return {
        "page_index": page.page_index,
        "width": page.width,
        "height": page.height,
        "text_runs": [
            {"text": r.text, "bbox": bbox_to_list(r.bbox), "font_size": r.font_size}
            for r in page.text_runs
        ],
        "line_segments": [
            {"x0": s.x0, "y0": s.y0, "x1": s.x1, "y1": s.y1,
             "thickness": s.thickness}
            for s in page.line_segments
        ],
        "image_regions": [bbox_to_list(b) for b in page.image_regions],
    }


class MetaAdapter:
    """POSTs the raw document to an external parser; returns a partial
    metadata candidate, or None when the service misbehaves."""

    def __init__(self, endpoint: str, priority: int, timeout: float = 30.0):
        self.endpoint = endpoint
        self.priority = priority
        self.timeout = timeout

    def fetch(self, filename: str, data: bytes) -> SourceCandidate | None:
        try:
            response = httpx.post(
                self.endpoint,
                content=data,
                headers={"Content-Type": "application/pdf",
                         "X-Filename": filename},
                timeout=self.timeout,
            )
            response.raise_for_status()
            payload = response.json()
        except Exception:
            return None
        if not isinstance(payload, dict):
            return None
        fields = {k: v for k, v in payload.items() if k in META_FIELDS}
        if not fields:
            return None
        return SourceCandidate(source_id=self.endpoint, priority=self.priority,
                               fields=fields)


class DetectorAdapter:
    """External region detector; falls back to None (use the built-in
    geometric detector) on any failure."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def detect(self, page: PageModel, kind: str) -> list[BBox] | None:
        try:
            response = httpx.post(
                self.endpoint,
                json={"kind": kind, "page": page_payload(page)},
                timeout=self.timeout,
            )
            response.raise_for_status()
            payload = response.json()
            regions = payload["regions"]
            return [BBox(*(float(v) for v in r)) for r in regions]
        except Exception:
            return None


class OcrAdapter:
    """Character recognition for image-only pages; required there, so
    failures raise instead of degrading."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def recognize(self, page: PageModel, region: BBox) -> str:
        try:
            response = httpx.post(
                self.endpoint,
                json={"page_index": page.page_index,
                      "region": bbox_to_list(region)},
                timeout=self.timeout,
            )
            response.raise_for_status()
            return str(response.json()["text"])
        except Exception as exc:
            raise OcrClientUnavailable(f"OCR service failed: {exc}") from exc


def build_adapters(config) -> dict:
    """Adapter set from an AdapterConfig; unset endpoints yield None."""
    meta = [
        MetaAdapter(endpoint, priority=i + 1, timeout=config.timeout_s)
        for i, endpoint in enumerate(config.meta_endpoints)
    ]
    detector = (DetectorAdapter(config.detector_endpoint, config.timeout_s)
                if config.detector_endpoint else None)
    ocr = (OcrAdapter(config.ocr_endpoint, config.timeout_s)
           if config.ocr_endpoint else None)
    return {"meta": meta, "detector": detector, "ocr": ocr}
