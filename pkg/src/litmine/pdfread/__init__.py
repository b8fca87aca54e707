"""Minimal PDF reader for born-digital documents.

Covers the profile this platform ingests: classic cross-reference
tables, Flate/ASCII85 filters, simple (one-byte encoded) fonts, path
and image operators. Encrypted and object-stream PDFs are rejected
with typed errors rather than mis-parsed.
"""

from .document import PdfDocument
from .content import PageContent, interpret_page

__all__ = ["PdfDocument", "PageContent", "interpret_page"]
