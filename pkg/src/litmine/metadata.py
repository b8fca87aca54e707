"""Article metadata: heuristic extraction, multi-source voting, validation."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field, asdict

from .errors import NoCandidates, ValidationError
from .geometry import PageModel
from .textspans import group_blocks, group_lines

META_FIELDS = ("title", "authors", "venue", "year", "doi", "abstract")

_YEAR_RE = re.compile(r"\b(1[5-9]\d{2}|20\d{2}|2100)\b")
_DOI_RE = re.compile(r"\b10\.\d{4,9}/\S+\b")


@dataclass
class MetaRecord:
    title: str = ""
    authors: list[str] = field(default_factory=list)
    venue: str = ""
    year: int | None = None
    doi: str | None = None
    abstract: str | None = None
    edited_by_user: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "MetaRecord":
        known = {k: v for k, v in data.items() if k in META_FIELDS or k == "edited_by_user"}
        return cls(**known)


@dataclass
class SourceCandidate:
    source_id: str
    priority: int  # lower = more trusted
    fields: dict   # partial MetaRecord content


def validate_meta(record: MetaRecord):
    if not record.title or not record.title.strip():
        raise ValidationError("title must be non-empty")
    if record.year is not None and not (1500 <= record.year <= 2100):
        raise ValidationError(f"year {record.year} outside [1500, 2100]")
    if any(not name or not name.strip() for name in record.authors):
        raise ValidationError("author names must be non-empty")


# ------------------------------------------------------------- extraction


def _split_authors(text: str) -> list[str]:
    parts = re.split(r",|;| and ", text)
    return [p.strip() for p in parts if p.strip()]


def extract_heuristic(pages: list[PageModel]) -> dict:
    """First-page layout heuristic: the largest-font block is the title,
    the next block is the author list, digit-free blocks before the
    abstract heading supply the venue, plus year/DOI token scans."""
    if not pages or not pages[0].text_runs:
        return {}
    blocks = group_blocks(group_lines(pages[0]))
    if not blocks:
        return {}
    fields: dict = {}

    title_idx = max(range(len(blocks)), key=lambda i: blocks[i].font_size)
    fields["title"] = blocks[title_idx].text

    abstract_idx = None
    for i, block in enumerate(blocks):
        if block.text.casefold().rstrip(":.") == "abstract":
            abstract_idx = i
            break
    if abstract_idx is not None and abstract_idx + 1 < len(blocks):
        fields["abstract"] = blocks[abstract_idx + 1].text

    stop = abstract_idx if abstract_idx is not None else len(blocks)
    if title_idx + 1 < stop:
        authors = _split_authors(blocks[title_idx + 1].text)
        if authors:
            fields["authors"] = authors
        for block in blocks[title_idx + 2:stop]:
            text = block.text
            if not any(ch.isdigit() for ch in text):
                fields["venue"] = text
                break

    page_text = " ".join(b.text for b in blocks)
    year_match = _YEAR_RE.search(page_text)
    if year_match:
        fields["year"] = int(year_match.group(0))
    doi_match = _DOI_RE.search(page_text)
    if doi_match:
        fields["doi"] = doi_match.group(0)
    return fields


def extract_meta_candidates(pages: list[PageModel],
                            external: list[SourceCandidate] | None = None
                            ) -> list[SourceCandidate]:
    """The built-in heuristic always contributes (priority 0); external
    parser results are appended as provided."""
    candidates = [SourceCandidate(source_id="builtin-layout", priority=0,
                                  fields=extract_heuristic(pages))]
    for cand in external or []:
        if isinstance(cand.fields, dict):
            candidates.append(cand)
    return candidates


# ----------------------------------------------------------------- voting


def _normalize(value) -> object:
    if isinstance(value, str):
        collapsed = " ".join(unicodedata.normalize("NFC", value).split())
        return collapsed.casefold()
    if isinstance(value, list):
        return tuple(_normalize(v) for v in value)
    return value


def vote_merge(candidates: list[SourceCandidate]) -> MetaRecord:
    """Per-field majority vote across candidates.

    A strict majority wins outright; otherwise the value with the most
    supporters wins, and remaining ties go to the supporter with the
    lowest priority number. Comparison normalizes case and whitespace;
    the stored value keeps the winner's original form.
    """
    if not candidates:
        raise NoCandidates("vote_merge requires at least one candidate")
    result: dict = {}
    for field_name in META_FIELDS:
        suppliers = [c for c in candidates
                     if field_name in c.fields and c.fields[field_name] not in (None, "", [])]
        if not suppliers:
            continue
        groups: dict[object, list[SourceCandidate]] = {}
        for c in suppliers:
            groups.setdefault(_normalize(c.fields[field_name]), []).append(c)
        best = max(
            groups.values(),
            key=lambda grp: (len(grp), -min(c.priority for c in grp)),
        )
        winner = min(best, key=lambda c: c.priority)
        result[field_name] = winner.fields[field_name]
    return MetaRecord(**result)
