from __future__ import annotations

import json
from pathlib import Path

import pytest

from litmine.fixturegen import generate_corpus


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("corpus")
    generate_corpus(out)
    return out


@pytest.fixture(scope="session")
def corpus(corpus_dir) -> list[tuple[Path, dict]]:
    """(pdf_path, sidecar truth) for every fixture, in filename order."""
    items = []
    for pdf in sorted(corpus_dir.glob("fixture_*.pdf")):
        sidecar = pdf.with_suffix(".json")
        items.append((pdf, json.loads(sidecar.read_text())))
    return items


def load_pages(pdf_path: Path):
    from litmine.ingest import DocumentSource, parse_document

    source = DocumentSource(doc_id="t", filename=pdf_path.name,
                            bytes=pdf_path.read_bytes())
    return parse_document(source)


@pytest.fixture(scope="session")
def parsed_corpus(corpus):
    """(pages, truth) per fixture; parsing once keeps the suite fast."""
    return [(load_pages(pdf), truth) for pdf, truth in corpus]
