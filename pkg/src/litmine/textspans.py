"""Text sections, rule-based entity annotation, and span management."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import InvalidOffsets, InvalidRule
from .geometry import PageModel, TextRun

# layout grouping constants (points / ratios)
_LINE_TOL = 1.5          # same-line baseline tolerance
_BLOCK_GAP_RATIO = 1.55  # paragraph break vs font size
_SIZE_BREAK = 0.5        # font-size change that breaks a block


@dataclass
class Line:
    y: float
    font_size: float
    runs: list[TextRun] = field(default_factory=list)

    @property
    def text(self) -> str:
        return " ".join(r.text for r in self.runs)


@dataclass
class Block:
    lines: list[Line] = field(default_factory=list)

    @property
    def text(self) -> str:
        return " ".join(line.text for line in self.lines)

    @property
    def font_size(self) -> float:
        return max(line.font_size for line in self.lines)


def group_lines(page: PageModel) -> list[Line]:
    """Cluster runs into visual lines by their descent-line coordinate."""
    lines: list[Line] = []
    for run in sorted(page.text_runs, key=lambda r: (r.bbox.y1, r.bbox.x0)):
        if lines and abs(run.bbox.y1 - lines[-1].y) <= _LINE_TOL:
            lines[-1].runs.append(run)
            lines[-1].font_size = max(lines[-1].font_size, run.font_size)
        else:
            lines.append(Line(y=run.bbox.y1, font_size=run.font_size, runs=[run]))
    for line in lines:
        line.runs.sort(key=lambda r: r.bbox.x0)
    return lines


def group_blocks(lines: list[Line]) -> list[Block]:
    """Merge consecutive lines into paragraphs.

    A new block starts when the baseline gap exceeds the leading
    threshold for the current font size, or when the font size changes.
    """
    blocks: list[Block] = []
    for line in lines:
        if blocks:
            prev = blocks[-1].lines[-1]
            gap = line.y - prev.y
            if (gap <= _BLOCK_GAP_RATIO * prev.font_size
                    and abs(line.font_size - prev.font_size) <= _SIZE_BREAK):
                blocks[-1].lines.append(line)
                continue
        blocks.append(Block(lines=[line]))
    return blocks


def extract_sections(pages: list[PageModel]) -> list[str]:
    """Reading-order paragraph texts across all pages; captions included."""
    sections: list[str] = []
    for page in pages:
        for block in group_blocks(group_lines(page)):
            text = block.text.strip()
            if text:
                sections.append(text)
    return sections


# ------------------------------------------------------------------- labels


@dataclass
class LabelConfig:
    label: str
    patterns: list[str] = field(default_factory=list)
    gazetteer: list[str] = field(default_factory=list)
    visible: bool = True
    linked_field: str | None = None


def validate_label_config(config: LabelConfig):
    if not config.label or not config.label.strip():
        raise InvalidRule("label name must be non-empty")
    for pattern in config.patterns:
        try:
            re.compile(pattern)
        except re.error as exc:
            raise InvalidRule(f"pattern {pattern!r} does not compile: {exc}") from exc
    for term in config.gazetteer:
        if not term:
            raise InvalidRule("gazetteer terms must be non-empty")


@dataclass
class EntitySpan:
    span_id: str
    doc_id: str
    section_index: int
    start: int
    end: int
    label: str
    text: str
    source: str = "auto"   # auto | manual
    linked_field: str | None = None

    def linked_to(self, field_name: str | None) -> "EntitySpan":
        return replace(self, linked_field=field_name)


def check_span_offsets(section_text: str, start: int, end: int):
    if not (0 <= start < end <= len(section_text)):
        raise InvalidOffsets(
            f"offsets [{start}, {end}) invalid for section of length {len(section_text)}")


def _gazetteer_pattern(term: str) -> str:
    # whole-term match: no letter or digit may touch either edge
    return rf"(?<![0-9A-Za-z]){re.escape(term)}(?![0-9A-Za-z])"


def _label_matches(section: str, config: LabelConfig) -> list[tuple[int, int]]:
    found: list[tuple[int, int]] = []
    for pattern in config.patterns:
        for m in re.finditer(pattern, section):
            if m.end() > m.start():
                found.append((m.start(), m.end()))
    for term in config.gazetteer:
        for m in re.finditer(_gazetteer_pattern(term), section):
            found.append((m.start(), m.end()))
    # leftmost-longest, non-overlapping within one label
    found.sort(key=lambda se: (se[0], -se[1]))
    kept: list[tuple[int, int]] = []
    last_end = -1
    for start, end in found:
        if start >= last_end:
            kept.append((start, end))
            last_end = end
    return kept


def auto_annotate(sections: list[str], configs: list[LabelConfig],
                  doc_id: str = "") -> list[EntitySpan]:
    """Run every label's rules over every section.

    Within a label, overlaps resolve leftmost-longest; spans of
    different labels may overlap freely.
    """
    for config in configs:
        validate_label_config(config)
    spans: list[EntitySpan] = []
    for index, section in enumerate(sections):
        for config in configs:
            for start, end in _label_matches(section, config):
                spans.append(EntitySpan(
                    span_id="",
                    doc_id=doc_id,
                    section_index=index,
                    start=start,
                    end=end,
                    label=config.label,
                    text=section[start:end],
                ))
    return spans


def find_stale_spans(sections: list[str], spans: list[EntitySpan]) -> list[str]:
    """Span ids whose stored text no longer matches the section substring."""
    stale = []
    for span in spans:
        if span.section_index >= len(sections):
            stale.append(span.span_id)
            continue
        section = sections[span.section_index]
        if span.end > len(section) or section[span.start:span.end] != span.text:
            stale.append(span.span_id)
    return stale
