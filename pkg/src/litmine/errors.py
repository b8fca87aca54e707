"""Error types shared across the platform.

Every failure that can cross the API boundary carries a stable machine
code so clients can branch on it without parsing message text.
"""

from __future__ import annotations


class LitmineError(Exception):
    """Base class; ``code`` is the wire-stable identifier."""

    code = "internal_error"
    http_status = 500

    def __init__(self, message: str = "", detail: dict | None = None):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.detail = detail or {}


# ---------------------------------------------------------------- ingest

class MalformedPdf(LitmineError):
    code = "malformed_pdf"
    http_status = 422


class EncryptedPdf(LitmineError):
    code = "encrypted_pdf"
    http_status = 422


class EmptyRegion(LitmineError):
    code = "empty_region"
    http_status = 422


# -------------------------------------------------------------- metadata

class NoCandidates(LitmineError):
    code = "no_candidates"
    http_status = 422


class ValidationError(LitmineError):
    code = "validation_error"
    http_status = 422


# ----------------------------------------------------- staged pipelines

class InvalidStage(LitmineError):
    code = "invalid_stage"
    http_status = 409


class RegionOutOfPage(LitmineError):
    code = "region_out_of_page"
    http_status = 422


class NoContent(LitmineError):
    code = "no_content"
    http_status = 422


class InvalidEdit(LitmineError):
    code = "invalid_edit"
    http_status = 422


class OcrClientUnavailable(LitmineError):
    code = "ocr_client_unavailable"
    http_status = 422


class UnknownCell(LitmineError):
    code = "unknown_cell"
    http_status = 404


# ----------------------------------------------------------- text spans

class InvalidRule(LitmineError):
    code = "invalid_rule"
    http_status = 422


class InvalidOffsets(LitmineError):
    code = "invalid_offsets"
    http_status = 422


class UnknownLabel(LitmineError):
    code = "unknown_label"
    http_status = 404


class UnknownSpan(LitmineError):
    code = "unknown_span"
    http_status = 404


class UnknownField(LitmineError):
    code = "unknown_field"
    http_status = 404


# ----------------------------------------------------------------- maps

class UnparseableLabel(LitmineError):
    code = "unparseable_label"
    http_status = 422


class InvalidValue(LitmineError):
    code = "invalid_value"
    http_status = 422


class UnknownLine(LitmineError):
    code = "unknown_line"
    http_status = 404


class InsufficientLines(LitmineError):
    code = "insufficient_lines"
    http_status = 422


class DegenerateAxis(LitmineError):
    code = "degenerate_axis"
    http_status = 422


class NotCalibrated(LitmineError):
    code = "not_calibrated"
    http_status = 409


class OutOfRegion(LitmineError):
    code = "out_of_region"
    http_status = 422


# ------------------------------------------------------------ integrate

class NoHeaderConfig(LitmineError):
    code = "no_header_config"
    http_status = 422


class KeyFieldUnmapped(LitmineError):
    code = "key_field_unmapped"
    http_status = 422


class EmptyHeaderRow(LitmineError):
    code = "empty_header_row"
    http_status = 422


class UnparseableFile(LitmineError):
    code = "unparseable_file"
    http_status = 422


class DuplicateField(LitmineError):
    code = "duplicate_field"
    http_status = 422


class KeyRemoved(LitmineError):
    code = "key_removed"
    http_status = 422


class HeaderMismatch(LitmineError):
    code = "header_mismatch"
    http_status = 409


# ---------------------------------------------------------------- store

class UnknownProject(LitmineError):
    code = "unknown_project"
    http_status = 404


class UnknownDocument(LitmineError):
    code = "unknown_document"
    http_status = 404


class UnknownUser(LitmineError):
    code = "unknown_user"
    http_status = 404


class UnknownTable(LitmineError):
    code = "unknown_table"
    http_status = 404


class UnknownMap(LitmineError):
    code = "unknown_map"
    http_status = 404


class DuplicateChecksum(LitmineError):
    code = "duplicate_checksum"
    http_status = 409


class NotLocked(LitmineError):
    code = "not_locked"
    http_status = 403


class LockHeld(LitmineError):
    code = "lock_held"
    http_status = 409


class PrincipalHeld(LitmineError):
    code = "principal_held"
    http_status = 403


# ------------------------------------------------------------------ api

class AuthenticationError(LitmineError):
    code = "authentication_error"
    http_status = 401
