"""Embedded persistent store: users, sessions, projects, files, locks,
artifacts, corrections, and search.

Single sqlite file, safe for concurrent callers; one write at a time.
The clock is injectable so lease and session expiry are testable.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import re
import secrets
import sqlite3
import threading
import time
from typing import Callable

from .errors import (
    AuthenticationError,
    DuplicateChecksum,
    LockHeld,
    NotLocked,
    PrincipalHeld,
    UnknownDocument,
    UnknownProject,
    UnknownSpan,
    UnknownTable,
    UnknownMap,
    UnknownUser,
    ValidationError,
)
from .geometry import PageModel
from .ingest import DocumentSource, compute_checksum, parse_document
from .integrate import DocumentDataset, HeaderConfig
from .maps import MapArtifact
from .metadata import MetaRecord, SourceCandidate
from .serde import (
    document_dataset_from_dict,
    document_dataset_to_dict,
    header_from_dict,
    header_to_dict,
    label_config_from_dict,
    label_config_to_dict,
    map_from_dict,
    map_to_dict,
    mapping_from_dict,
    mapping_to_dict,
    span_from_dict,
    span_to_dict,
    table_from_dict,
    table_to_dict,
)
from .tables import TableArtifact
from .textspans import EntitySpan, LabelConfig, validate_label_config

SCHEMA_VERSION = 1

_SCHEMA = """
CREATE TABLE IF NOT EXISTS schema_info (version INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS counters (name TEXT PRIMARY KEY, value INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS users (
    user_id TEXT PRIMARY KEY,
    display_name TEXT NOT NULL UNIQUE,
    credential TEXT NOT NULL,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
    token TEXT PRIMARY KEY,
    user_id TEXT NOT NULL,
    expires_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS projects (
    project_id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    description TEXT NOT NULL DEFAULT '',
    labels TEXT NOT NULL DEFAULT '[]',
    header TEXT,
    created_by TEXT NOT NULL,
    created_at REAL NOT NULL,
    updated_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS files (
    file_id TEXT PRIMARY KEY,
    project_id TEXT NOT NULL,
    filename TEXT NOT NULL,
    checksum TEXT NOT NULL,
    data BLOB NOT NULL,
    uploader TEXT NOT NULL,
    last_editor TEXT NOT NULL,
    uploaded_at REAL NOT NULL,
    updated_at REAL NOT NULL,
    parse_status TEXT NOT NULL DEFAULT 'pending',
    parse_error TEXT,
    page_count INTEGER NOT NULL DEFAULT 0,
    principal TEXT,
    lock_holder TEXT,
    lock_acquired REAL,
    lock_expires REAL,
    last_mutation REAL,
    UNIQUE (project_id, checksum)
);
CREATE TABLE IF NOT EXISTS meta_records (
    doc_id TEXT PRIMARY KEY,
    payload TEXT NOT NULL,
    updated_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS meta_candidates (
    doc_id TEXT NOT NULL,
    source_id TEXT NOT NULL,
    priority INTEGER NOT NULL,
    payload TEXT NOT NULL,
    PRIMARY KEY (doc_id, source_id)
);
CREATE TABLE IF NOT EXISTS sections (
    doc_id TEXT NOT NULL,
    section_index INTEGER NOT NULL,
    text TEXT NOT NULL,
    PRIMARY KEY (doc_id, section_index)
);
CREATE TABLE IF NOT EXISTS spans (
    span_id TEXT PRIMARY KEY,
    doc_id TEXT NOT NULL,
    payload TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS table_artifacts (
    table_id TEXT PRIMARY KEY,
    doc_id TEXT NOT NULL,
    page_index INTEGER NOT NULL,
    stage TEXT NOT NULL,
    payload TEXT NOT NULL,
    updated_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS map_artifacts (
    map_id TEXT PRIMARY KEY,
    doc_id TEXT NOT NULL,
    page_index INTEGER NOT NULL,
    stage TEXT NOT NULL,
    payload TEXT NOT NULL,
    updated_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS col_mappings (
    table_id TEXT PRIMARY KEY,
    payload TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS doc_datasets (
    doc_id TEXT PRIMARY KEY,
    payload TEXT NOT NULL,
    header TEXT NOT NULL,
    built_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS corrections (
    event_id INTEGER PRIMARY KEY AUTOINCREMENT,
    project_id TEXT NOT NULL,
    doc_id TEXT,
    module TEXT NOT NULL,
    stage TEXT NOT NULL DEFAULT '',
    before TEXT NOT NULL,
    after TEXT NOT NULL,
    user_id TEXT NOT NULL,
    time REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS views (
    user_id TEXT NOT NULL,
    file_id TEXT NOT NULL,
    viewed_at REAL NOT NULL,
    PRIMARY KEY (user_id, file_id)
);
"""

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.casefold())


def hash_password(password: str, cost: int = 14) -> str:
    """scrypt with per-user salt; cost is the CPU/memory exponent."""
    salt = os.urandom(16)
    digest = hashlib.scrypt(password.encode(), salt=salt, n=1 << cost, r=8, p=1)
    return f"scrypt${cost}${salt.hex()}${digest.hex()}"


def verify_password(password: str, credential: str) -> bool:
    try:
        scheme, cost_s, salt_hex, digest_hex = credential.split("$")
        if scheme != "scrypt":
            return False
        digest = hashlib.scrypt(password.encode(), salt=bytes.fromhex(salt_hex),
                                n=1 << int(cost_s), r=8, p=1)
        return hmac.compare_digest(digest.hex(), digest_hex)
    except (ValueError, TypeError):
        return False


def _row_to_file(row: sqlite3.Row) -> dict:
    return {
        "file_id": row["file_id"],
        "project_id": row["project_id"],
        "filename": row["filename"],
        "checksum": row["checksum"],
        "uploader": row["uploader"],
        "last_editor": row["last_editor"],
        "uploaded_at": row["uploaded_at"],
        "updated_at": row["updated_at"],
        "parse_status": row["parse_status"],
        "parse_error": row["parse_error"],
        "page_count": row["page_count"],
        "principal": row["principal"],
        "lock": {
            "holder": row["lock_holder"],
            "acquired_at": row["lock_acquired"],
            "expires_at": row["lock_expires"],
        } if row["lock_holder"] else None,
    }


class Store:
    def __init__(self, path: str = ":memory:", *,
                 clock: Callable[[], float] = time.time,
                 lease_duration: float = 600.0,
                 session_duration: float = 12 * 3600.0,
                 scrypt_cost: int = 14):
        self._db = sqlite3.connect(path, check_same_thread=False)
        self._db.row_factory = sqlite3.Row
        self._db.execute("PRAGMA journal_mode=WAL")
        self._lock = threading.RLock()
        self.clock = clock
        self.lease_duration = lease_duration
        self.session_duration = session_duration
        self.scrypt_cost = scrypt_cost
        self._pages_cache: dict[str, list[PageModel]] = {}
        self._search_index: dict[str, dict[str, set[str]]] = {}
        with self._lock, self._db:
            self._db.executescript(_SCHEMA)
            row = self._db.execute("SELECT version FROM schema_info").fetchone()
            if row is None:
                self._db.execute("INSERT INTO schema_info VALUES (?)",
                                 (SCHEMA_VERSION,))
            elif row["version"] != SCHEMA_VERSION:
                raise ValidationError(
                    f"store schema v{row['version']} needs migration to "
                    f"v{SCHEMA_VERSION}")

    def close(self):
        with self._lock:
            self._db.close()

    def _next_id(self, name: str) -> int:
        cur = self._db.execute(
            "INSERT INTO counters (name, value) VALUES (?, 1) "
            "ON CONFLICT(name) DO UPDATE SET value = value + 1 "
            "RETURNING value", (name,))
        return cur.fetchone()[0]

    # ------------------------------------------------------------- users

    def create_user(self, display_name: str, password: str) -> dict:
        if not display_name.strip():
            raise ValidationError("display name must be non-empty")
        if not password:
            raise ValidationError("password must be non-empty")
        with self._lock, self._db:
            exists = self._db.execute(
                "SELECT 1 FROM users WHERE display_name = ?",
                (display_name,)).fetchone()
            if exists:
                raise ValidationError(f"user {display_name!r} already exists")
            user_id = f"u{self._next_id('users')}"
            self._db.execute(
                "INSERT INTO users VALUES (?, ?, ?, ?)",
                (user_id, display_name,
                 hash_password(password, self.scrypt_cost), self.clock()))
        return {"user_id": user_id, "display_name": display_name}

    def get_user(self, user_id: str) -> dict:
        with self._lock:
            row = self._db.execute(
                "SELECT user_id, display_name FROM users WHERE user_id = ?",
                (user_id,)).fetchone()
        if row is None:
            raise UnknownUser(f"no user {user_id!r}")
        return dict(row)

    def authenticate(self, display_name: str, password: str) -> dict:
        with self._lock:
            row = self._db.execute(
                "SELECT user_id, display_name, credential FROM users "
                "WHERE display_name = ?", (display_name,)).fetchone()
        # verify against a dummy credential when the user is unknown so
        # lookup success is not observable through timing
        credential = row["credential"] if row else hash_password("!", 4)
        if not verify_password(password, credential) or row is None:
            raise AuthenticationError("unknown user or wrong password")
        return {"user_id": row["user_id"], "display_name": row["display_name"]}

    # ----------------------------------------------------------- sessions

    def create_session(self, user_id: str) -> dict:
        expires = self.clock() + self.session_duration
        token = secrets.token_hex(32)
        with self._lock, self._db:
            self._db.execute("INSERT INTO sessions VALUES (?, ?, ?)",
                             (token, user_id, expires))
        return {"token": token, "user_id": user_id, "expires_at": expires}

    def session_user(self, token: str) -> str:
        with self._lock:
            row = self._db.execute(
                "SELECT user_id, expires_at FROM sessions WHERE token = ?",
                (token,)).fetchone()
        if row is None or row["expires_at"] <= self.clock():
            raise AuthenticationError("missing or expired session")
        return row["user_id"]

    def delete_session(self, token: str):
        with self._lock, self._db:
            self._db.execute("DELETE FROM sessions WHERE token = ?", (token,))

    # ----------------------------------------------------------- projects

    def create_project(self, name: str, description: str, created_by: str) -> dict:
        if not name.strip():
            raise ValidationError("project name must be non-empty")
        now = self.clock()
        with self._lock, self._db:
            project_id = f"p{self._next_id('projects')}"
            self._db.execute(
                "INSERT INTO projects VALUES (?, ?, ?, '[]', NULL, ?, ?, ?)",
                (project_id, name, description, created_by, now, now))
        return self.get_project(project_id)

    def _project_row(self, project_id: str) -> sqlite3.Row:
        row = self._db.execute(
            "SELECT * FROM projects WHERE project_id = ?", (project_id,)).fetchone()
        if row is None:
            raise UnknownProject(f"no project {project_id!r}")
        return row

    def get_project(self, project_id: str) -> dict:
        with self._lock:
            row = self._project_row(project_id)
        return {
            "project_id": row["project_id"],
            "name": row["name"],
            "description": row["description"],
            "labels": json.loads(row["labels"]),
            "header": json.loads(row["header"]) if row["header"] else None,
            "created_by": row["created_by"],
            "created_at": row["created_at"],
            "updated_at": row["updated_at"],
        }

    def list_projects(self) -> list[dict]:
        with self._lock:
            rows = self._db.execute(
                "SELECT project_id FROM projects ORDER BY project_id").fetchall()
        return [self.get_project(r["project_id"]) for r in rows]

    def update_settings(self, project_id: str, *, name: str | None = None,
                        description: str | None = None,
                        labels: list[LabelConfig] | None = None,
                        header: HeaderConfig | None = None,
                        clear_header: bool = False) -> dict:
        with self._lock, self._db:
            row = self._project_row(project_id)
            new_name = row["name"] if name is None else name
            if not new_name.strip():
                raise ValidationError("project name must be non-empty")
            new_desc = row["description"] if description is None else description
            labels_json = row["labels"]
            if labels is not None:
                for config in labels:
                    validate_label_config(config)
                if len({c.label for c in labels}) != len(labels):
                    raise ValidationError("label names must be unique")
                labels_json = json.dumps([label_config_to_dict(c) for c in labels])
            header_json = row["header"]
            if clear_header:
                header_json = None
            elif header is not None:
                header_json = json.dumps(header_to_dict(header))
            self._db.execute(
                "UPDATE projects SET name=?, description=?, labels=?, header=?, "
                "updated_at=? WHERE project_id=?",
                (new_name, new_desc, labels_json, header_json, self.clock(),
                 project_id))
        return self.get_project(project_id)

    def project_labels(self, project_id: str) -> list[LabelConfig]:
        return [label_config_from_dict(d)
                for d in self.get_project(project_id)["labels"]]

    def project_header(self, project_id: str) -> HeaderConfig | None:
        data = self.get_project(project_id)["header"]
        return header_from_dict(data) if data else None

    # -------------------------------------------------------------- files

    def upload_file(self, project_id: str, filename: str, data: bytes,
                    uploader: str) -> dict:
        if not data:
            raise ValidationError("upload is empty")
        checksum = compute_checksum(data)
        now = self.clock()
        with self._lock, self._db:
            self._project_row(project_id)
            existing = self._db.execute(
                "SELECT file_id FROM files WHERE project_id = ? AND checksum = ?",
                (project_id, checksum)).fetchone()
            if existing:
                raise DuplicateChecksum(
                    f"identical file already uploaded as {existing['file_id']}",
                    detail={"existing_file_id": existing["file_id"]})
            file_id = f"d{self._next_id('files')}"
            self._db.execute(
                "INSERT INTO files (file_id, project_id, filename, checksum, data, "
                "uploader, last_editor, uploaded_at, updated_at) "
                "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (file_id, project_id, filename, checksum, data, uploader,
                 uploader, now, now))
            self._search_index.pop(project_id, None)
        return self.get_file(file_id)

    def _file_row(self, file_id: str) -> sqlite3.Row:
        row = self._db.execute(
            "SELECT * FROM files WHERE file_id = ?", (file_id,)).fetchone()
        if row is None:
            raise UnknownDocument(f"no document {file_id!r}")
        return row

    def get_file(self, file_id: str) -> dict:
        with self._lock:
            return _row_to_file(self._file_row(file_id))

    def file_bytes(self, file_id: str) -> bytes:
        with self._lock:
            return bytes(self._file_row(file_id)["data"])

    def file_project(self, file_id: str) -> str:
        with self._lock:
            return self._file_row(file_id)["project_id"]

    def list_files(self, project_id: str) -> list[dict]:
        with self._lock:
            self._project_row(project_id)
            rows = self._db.execute(
                "SELECT * FROM files WHERE project_id = ? "
                "ORDER BY updated_at DESC, file_id", (project_id,)).fetchall()
        return [_row_to_file(r) for r in rows]

    def set_parse_result(self, file_id: str, status: str,
                         error: str | None = None, page_count: int = 0):
        with self._lock, self._db:
            self._file_row(file_id)
            self._db.execute(
                "UPDATE files SET parse_status=?, parse_error=?, page_count=? "
                "WHERE file_id=?", (status, error, page_count, file_id))

    def pages(self, file_id: str) -> list[PageModel]:
        """Parsed page models; documents are immutable so this caches."""
        with self._lock:
            cached = self._pages_cache.get(file_id)
            if cached is not None:
                return cached
            row = self._file_row(file_id)
            source = DocumentSource(doc_id=file_id, filename=row["filename"],
                                    bytes=bytes(row["data"]))
            pages = parse_document(source)
            self._pages_cache[file_id] = pages
            return pages

    def touch(self, file_id: str, user_id: str):
        """Record a mutation: bumps updated_at, last_editor, lease activity."""
        now = self.clock()
        with self._lock, self._db:
            self._file_row(file_id)
            self._db.execute(
                "UPDATE files SET updated_at=?, last_editor=?, last_mutation=? "
                "WHERE file_id=?", (now, user_id, now, file_id))

    # -------------------------------------------------------------- locks

    def _lease_active(self, row: sqlite3.Row, now: float) -> bool:
        return row["lock_holder"] is not None and row["lock_expires"] > now

    def acquire_lock(self, file_id: str, user_id: str) -> dict:
        now = self.clock()
        with self._lock, self._db:
            row = self._file_row(file_id)
            if self._lease_active(row, now) and row["lock_holder"] != user_id:
                idle_for = now - (row["last_mutation"] or row["lock_acquired"])
                evictable = (row["principal"] == user_id
                             and idle_for >= self.lease_duration / 2)
                if not evictable:
                    raise LockHeld(
                        f"locked by {row['lock_holder']} until {row['lock_expires']}",
                        detail={"holder": row["lock_holder"],
                                "expires_at": row["lock_expires"]})
            expires = now + self.lease_duration
            self._db.execute(
                "UPDATE files SET lock_holder=?, lock_acquired=?, lock_expires=?, "
                "last_mutation=? WHERE file_id=?",
                (user_id, now, expires, now, file_id))
        return {"holder": user_id, "acquired_at": now, "expires_at": expires}

    def renew_lock(self, file_id: str, user_id: str) -> dict:
        now = self.clock()
        with self._lock, self._db:
            row = self._file_row(file_id)
            if not self._lease_active(row, now):
                raise NotLocked("no active lease to renew")
            if row["lock_holder"] != user_id:
                raise LockHeld(
                    f"locked by {row['lock_holder']}",
                    detail={"holder": row["lock_holder"],
                            "expires_at": row["lock_expires"]})
            expires = now + self.lease_duration
            self._db.execute(
                "UPDATE files SET lock_expires=? WHERE file_id=?",
                (expires, file_id))
        return {"holder": user_id, "acquired_at": row["lock_acquired"],
                "expires_at": expires}

    def release_lock(self, file_id: str, user_id: str):
        now = self.clock()
        with self._lock, self._db:
            row = self._file_row(file_id)
            if not self._lease_active(row, now):
                raise NotLocked("no active lease to release")
            if row["lock_holder"] != user_id:
                raise LockHeld(f"locked by {row['lock_holder']}",
                               detail={"holder": row["lock_holder"]})
            self._db.execute(
                "UPDATE files SET lock_holder=NULL, lock_acquired=NULL, "
                "lock_expires=NULL WHERE file_id=?", (file_id,))

    def require_lock(self, file_id: str, user_id: str):
        now = self.clock()
        with self._lock:
            row = self._file_row(file_id)
            if not self._lease_active(row, now) or row["lock_holder"] != user_id:
                raise NotLocked("operation requires an active lock lease")

    # ---------------------------------------------------------- principal

    def take_charge(self, file_id: str, user_id: str) -> dict:
        with self._lock, self._db:
            row = self._file_row(file_id)
            if row["principal"] is not None and row["principal"] != user_id:
                raise PrincipalHeld(
                    f"{row['principal']} is already the principal",
                    detail={"principal": row["principal"]})
            self._db.execute("UPDATE files SET principal=? WHERE file_id=?",
                             (user_id, file_id))
        return self.get_file(file_id)

    def release_charge(self, file_id: str, user_id: str) -> dict:
        with self._lock, self._db:
            row = self._file_row(file_id)
            if row["principal"] != user_id:
                raise PrincipalHeld("only the principal can step down")
            self._db.execute("UPDATE files SET principal=NULL WHERE file_id=?",
                             (file_id,))
        return self.get_file(file_id)

    # ------------------------------------------------------ views, search

    def record_view(self, user_id: str, file_id: str):
        with self._lock, self._db:
            self._file_row(file_id)
            self._db.execute(
                "INSERT INTO views VALUES (?, ?, ?) "
                "ON CONFLICT(user_id, file_id) DO UPDATE SET viewed_at=excluded.viewed_at",
                (user_id, file_id, self.clock()))

    def recent_files(self, user_id: str, limit: int = 20) -> list[dict]:
        with self._lock:
            rows = self._db.execute(
                "SELECT f.* FROM views v JOIN files f ON f.file_id = v.file_id "
                "WHERE v.user_id = ? ORDER BY v.viewed_at DESC, f.file_id "
                "LIMIT ?", (user_id, limit)).fetchall()
        return [_row_to_file(r) for r in rows]

    def my_files(self, user_id: str) -> list[dict]:
        with self._lock:
            rows = self._db.execute(
                "SELECT * FROM files WHERE principal = ? "
                "ORDER BY updated_at DESC, file_id", (user_id,)).fetchall()
        return [_row_to_file(r) for r in rows]

    def _project_index(self, project_id: str) -> dict[str, set[str]]:
        index = self._search_index.get(project_id)
        if index is not None:
            return index
        index = {}
        rows = self._db.execute(
            "SELECT file_id, filename FROM files WHERE project_id = ?",
            (project_id,)).fetchall()
        for row in rows:
            meta_row = self._db.execute(
                "SELECT payload FROM meta_records WHERE doc_id = ?",
                (row["file_id"],)).fetchone()
            text = row["filename"]
            if meta_row:
                meta = MetaRecord.from_dict(json.loads(meta_row["payload"]))
                text = " ".join([
                    meta.title, " ".join(meta.authors), meta.venue,
                    str(meta.year or ""), meta.abstract or "", row["filename"],
                ])
            for token in set(_tokens(text)):
                index.setdefault(token, set()).add(row["file_id"])
        self._search_index[project_id] = index
        return index

    def search_files(self, project_id: str, query: str) -> list[dict]:
        """Rank by number of matched query tokens, then recency."""
        files = self.list_files(project_id)
        terms = _tokens(query)
        if not terms:
            return files
        with self._lock:
            index = self._project_index(project_id)
        scores = {}
        for term in set(terms):
            for file_id in index.get(term, ()):
                scores[file_id] = scores.get(file_id, 0) + 1
        matched = [f for f in files if f["file_id"] in scores]
        matched.sort(key=lambda f: (-scores[f["file_id"]], -f["updated_at"],
                                    f["file_id"]))
        return matched

    # ----------------------------------------------------------- metadata

    def save_meta_candidates(self, doc_id: str,
                             candidates: list[SourceCandidate]):
        with self._lock, self._db:
            self._file_row(doc_id)
            self._db.execute("DELETE FROM meta_candidates WHERE doc_id = ?",
                             (doc_id,))
            for cand in candidates:
                self._db.execute(
                    "INSERT INTO meta_candidates VALUES (?, ?, ?, ?)",
                    (doc_id, cand.source_id, cand.priority,
                     json.dumps(cand.fields)))

    def meta_candidates(self, doc_id: str) -> list[SourceCandidate]:
        with self._lock:
            rows = self._db.execute(
                "SELECT * FROM meta_candidates WHERE doc_id = ? ORDER BY priority",
                (doc_id,)).fetchall()
        return [SourceCandidate(r["source_id"], r["priority"],
                                json.loads(r["payload"])) for r in rows]

    def save_meta_record(self, doc_id: str, record: MetaRecord):
        with self._lock, self._db:
            self._file_row(doc_id)
            self._db.execute(
                "INSERT INTO meta_records VALUES (?, ?, ?) "
                "ON CONFLICT(doc_id) DO UPDATE SET payload=excluded.payload, "
                "updated_at=excluded.updated_at",
                (doc_id, json.dumps(record.to_dict()), self.clock()))
            project_id = self._file_row(doc_id)["project_id"]
            self._search_index.pop(project_id, None)

    def meta_record(self, doc_id: str) -> MetaRecord | None:
        with self._lock:
            row = self._db.execute(
                "SELECT payload FROM meta_records WHERE doc_id = ?",
                (doc_id,)).fetchone()
        return MetaRecord.from_dict(json.loads(row["payload"])) if row else None

    # ----------------------------------------------------------- sections

    def save_sections(self, doc_id: str, sections: list[str]):
        with self._lock, self._db:
            self._db.execute("DELETE FROM sections WHERE doc_id = ?", (doc_id,))
            self._db.executemany(
                "INSERT INTO sections VALUES (?, ?, ?)",
                [(doc_id, i, text) for i, text in enumerate(sections)])

    def sections(self, doc_id: str) -> list[str]:
        with self._lock:
            rows = self._db.execute(
                "SELECT text FROM sections WHERE doc_id = ? ORDER BY section_index",
                (doc_id,)).fetchall()
        return [r["text"] for r in rows]

    # -------------------------------------------------------------- spans

    def next_span_id(self) -> str:
        with self._lock, self._db:
            return f"s{self._next_id('spans')}"

    def save_span(self, span: EntitySpan):
        with self._lock, self._db:
            self._db.execute(
                "INSERT INTO spans VALUES (?, ?, ?) "
                "ON CONFLICT(span_id) DO UPDATE SET payload=excluded.payload",
                (span.span_id, span.doc_id, json.dumps(span_to_dict(span))))

    def get_span(self, span_id: str) -> EntitySpan:
        with self._lock:
            row = self._db.execute(
                "SELECT payload FROM spans WHERE span_id = ?",
                (span_id,)).fetchone()
        if row is None:
            raise UnknownSpan(f"no span {span_id!r}")
        return span_from_dict(json.loads(row["payload"]))

    def delete_span(self, span_id: str):
        with self._lock, self._db:
            cur = self._db.execute("DELETE FROM spans WHERE span_id = ?",
                                   (span_id,))
            if cur.rowcount == 0:
                raise UnknownSpan(f"no span {span_id!r}")

    def list_spans(self, doc_id: str) -> list[EntitySpan]:
        with self._lock:
            rows = self._db.execute(
                "SELECT payload FROM spans WHERE doc_id = ?", (doc_id,)).fetchall()
        spans = [span_from_dict(json.loads(r["payload"])) for r in rows]
        spans.sort(key=lambda s: (s.section_index, s.start, s.end, s.span_id))
        return spans

    # ----------------------------------------------------------- artifacts

    def save_table(self, artifact: TableArtifact):
        artifact.updated_at = self.clock()
        if not artifact.created_at:
            artifact.created_at = artifact.updated_at
        with self._lock, self._db:
            self._db.execute(
                "INSERT INTO table_artifacts VALUES (?, ?, ?, ?, ?, ?) "
                "ON CONFLICT(table_id) DO UPDATE SET stage=excluded.stage, "
                "payload=excluded.payload, updated_at=excluded.updated_at",
                (artifact.table_id, artifact.doc_id, artifact.page_index,
                 artifact.stage.name, json.dumps(table_to_dict(artifact)),
                 artifact.updated_at))

    def get_table(self, table_id: str) -> TableArtifact:
        with self._lock:
            row = self._db.execute(
                "SELECT payload FROM table_artifacts WHERE table_id = ?",
                (table_id,)).fetchone()
        if row is None:
            raise UnknownTable(f"no table {table_id!r}")
        return table_from_dict(json.loads(row["payload"]))

    def list_tables(self, doc_id: str) -> list[TableArtifact]:
        with self._lock:
            rows = self._db.execute(
                "SELECT payload FROM table_artifacts WHERE doc_id = ? "
                "ORDER BY page_index, table_id", (doc_id,)).fetchall()
        return [table_from_dict(json.loads(r["payload"])) for r in rows]

    def replace_detected_tables(self, doc_id: str, page_index: int,
                                artifacts: list[TableArtifact]):
        """Refresh stage-Detected proposals for one page, leaving any
        artifact a human has already advanced untouched."""
        with self._lock, self._db:
            self._db.execute(
                "DELETE FROM table_artifacts WHERE doc_id = ? AND page_index = ? "
                "AND stage = 'DETECTED'", (doc_id, page_index))
            kept = {
                r["table_id"] for r in self._db.execute(
                    "SELECT table_id FROM table_artifacts WHERE doc_id = ? "
                    "AND page_index = ?", (doc_id, page_index))
            }
            for artifact in artifacts:
                if artifact.table_id not in kept:
                    self.save_table(artifact)

    def confirmed_tables(self, doc_id: str) -> list[TableArtifact]:
        """ContentConfirmed tables in confirmation (updated_at) order."""
        tables = [t for t in self.list_tables(doc_id)
                  if t.stage.name == "CONTENT_CONFIRMED"]
        tables.sort(key=lambda t: (t.updated_at, t.table_id))
        return tables

    def save_map(self, artifact: MapArtifact):
        artifact.updated_at = self.clock()
        if not artifact.created_at:
            artifact.created_at = artifact.updated_at
        with self._lock, self._db:
            self._db.execute(
                "INSERT INTO map_artifacts VALUES (?, ?, ?, ?, ?, ?) "
                "ON CONFLICT(map_id) DO UPDATE SET stage=excluded.stage, "
                "payload=excluded.payload, updated_at=excluded.updated_at",
                (artifact.map_id, artifact.doc_id, artifact.page_index,
                 artifact.stage.name, json.dumps(map_to_dict(artifact)),
                 artifact.updated_at))

    def get_map(self, map_id: str) -> MapArtifact:
        with self._lock:
            row = self._db.execute(
                "SELECT payload FROM map_artifacts WHERE map_id = ?",
                (map_id,)).fetchone()
        if row is None:
            raise UnknownMap(f"no map {map_id!r}")
        return map_from_dict(json.loads(row["payload"]))

    def list_maps(self, doc_id: str) -> list[MapArtifact]:
        with self._lock:
            rows = self._db.execute(
                "SELECT payload FROM map_artifacts WHERE doc_id = ? "
                "ORDER BY page_index, map_id", (doc_id,)).fetchall()
        return [map_from_dict(json.loads(r["payload"])) for r in rows]

    def replace_detected_maps(self, doc_id: str, page_index: int,
                              artifacts: list[MapArtifact]):
        with self._lock, self._db:
            self._db.execute(
                "DELETE FROM map_artifacts WHERE doc_id = ? AND page_index = ? "
                "AND stage = 'DETECTED'", (doc_id, page_index))
            kept = {
                r["map_id"] for r in self._db.execute(
                    "SELECT map_id FROM map_artifacts WHERE doc_id = ? "
                    "AND page_index = ?", (doc_id, page_index))
            }
            for artifact in artifacts:
                if artifact.map_id not in kept:
                    self.save_map(artifact)

    # ------------------------------------------------------ column mappings

    def save_column_mapping(self, mapping):
        with self._lock, self._db:
            self._db.execute(
                "INSERT INTO col_mappings VALUES (?, ?) "
                "ON CONFLICT(table_id) DO UPDATE SET payload=excluded.payload",
                (mapping.table_id, json.dumps(mapping_to_dict(mapping))))

    def column_mapping(self, table_id: str):
        with self._lock:
            row = self._db.execute(
                "SELECT payload FROM col_mappings WHERE table_id = ?",
                (table_id,)).fetchone()
        return mapping_from_dict(json.loads(row["payload"])) if row else None

    # ----------------------------------------------------------- datasets

    def save_document_dataset(self, dataset: DocumentDataset,
                              header: HeaderConfig):
        with self._lock, self._db:
            self._db.execute(
                "INSERT INTO doc_datasets VALUES (?, ?, ?, ?) "
                "ON CONFLICT(doc_id) DO UPDATE SET payload=excluded.payload, "
                "header=excluded.header, built_at=excluded.built_at",
                (dataset.doc_id, json.dumps(document_dataset_to_dict(dataset)),
                 json.dumps(header_to_dict(header)), self.clock()))

    def document_dataset(self, doc_id: str) -> tuple[DocumentDataset, HeaderConfig] | None:
        with self._lock:
            row = self._db.execute(
                "SELECT payload, header FROM doc_datasets WHERE doc_id = ?",
                (doc_id,)).fetchone()
        if row is None:
            return None
        return (document_dataset_from_dict(json.loads(row["payload"])),
                header_from_dict(json.loads(row["header"])))

    def project_datasets(self, project_id: str) -> list[tuple[DocumentDataset, HeaderConfig]]:
        """Datasets of the project's documents in upload order."""
        with self._lock:
            rows = self._db.execute(
                "SELECT d.payload, d.header FROM doc_datasets d "
                "JOIN files f ON f.file_id = d.doc_id "
                "WHERE f.project_id = ? "
                "ORDER BY CAST(SUBSTR(f.file_id, 2) AS INTEGER)",
                (project_id,)).fetchall()
        return [(document_dataset_from_dict(json.loads(r["payload"])),
                 header_from_dict(json.loads(r["header"]))) for r in rows]

    # --------------------------------------------------------- corrections

    def append_correction(self, project_id: str, doc_id: str | None,
                          module: str, stage: str, before, after,
                          user_id: str) -> int:
        with self._lock, self._db:
            cur = self._db.execute(
                "INSERT INTO corrections (project_id, doc_id, module, stage, "
                "before, after, user_id, time) VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                (project_id, doc_id, module, stage, json.dumps(before),
                 json.dumps(after), user_id, self.clock()))
            return cur.lastrowid

    def corrections(self, project_id: str) -> list[dict]:
        with self._lock:
            rows = self._db.execute(
                "SELECT * FROM corrections WHERE project_id = ? ORDER BY event_id",
                (project_id,)).fetchall()
        return [{
            "event_id": r["event_id"],
            "doc_id": r["doc_id"],
            "module": r["module"],
            "stage": r["stage"],
            "before": json.loads(r["before"]),
            "after": json.loads(r["after"]),
            "user": r["user_id"],
            "time": r["time"],
        } for r in rows]

    def export_corrections(self, project_id: str) -> bytes:
        """Newline-delimited records in event order."""
        lines = [json.dumps(event, sort_keys=True)
                 for event in self.corrections(project_id)]
        return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")
