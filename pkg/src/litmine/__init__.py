"""Document annotation platform: staged human-confirmed extraction of
metadata, tables, text entities and map coordinates from scientific PDFs."""

__version__ = "0.1.0"
