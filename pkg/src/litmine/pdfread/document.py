"""PDF file structure: cross-reference table, object store, page tree."""

from __future__ import annotations

import re

from ..errors import EncryptedPdf, MalformedPdf
from .objects import ObjectParser, Ref, Stream, decode_stream

_OBJ_RE = re.compile(rb"(\d+)\s+(\d+)\s+obj\b")


class PdfDocument:
    def __init__(self, data: bytes):
        if not data.lstrip()[:5].startswith(b"%PDF-"):
            raise MalformedPdf("missing %PDF header")
        self.data = data
        self._cache: dict[int, object] = {}
        self._offsets: dict[int, int] = {}
        self.trailer: dict = {}
        try:
            self._load_xref()
        except MalformedPdf:
            self._rebuild_offsets()
        if not self._offsets:
            self._rebuild_offsets()
        if not self.trailer:
            self._find_trailer_by_scan()
        if "Encrypt" in self.trailer:
            raise EncryptedPdf("document is password protected")
        root = self.resolve(self.trailer.get("Root"))
        if not isinstance(root, dict):
            raise MalformedPdf("no document catalog")
        self.catalog = root

    # ------------------------------------------------------------ xref

    def _load_xref(self):
        tail = self.data[-1024:]
        m = None
        for m in re.finditer(rb"startxref\s+(\d+)", tail):
            pass
        if m is None:
            raise MalformedPdf("startxref not found")
        offset = int(m.group(1))
        seen = set()
        while offset and offset not in seen:
            seen.add(offset)
            offset = self._parse_xref_section(offset)

    def _parse_xref_section(self, offset: int) -> int:
        if offset < 0 or offset >= len(self.data):
            raise MalformedPdf(f"xref offset {offset} out of range")
        parser = ObjectParser(self.data, offset)
        token = parser.next_token()
        if token == "xref":
            while True:
                token = parser.next_token()
                if token == "trailer":
                    break
                if not isinstance(token, int):
                    raise MalformedPdf(f"bad xref subsection header: {token!r}")
                start = token
                count = parser.next_token()
                if not isinstance(count, int):
                    raise MalformedPdf("bad xref subsection count")
                for i in range(count):
                    pos = parser.next_token()
                    gen = parser.next_token()
                    kind = parser.next_token()
                    if not isinstance(pos, int) or not isinstance(gen, int):
                        raise MalformedPdf("bad xref entry")
                    num = start + i
                    if kind == "n" and num not in self._offsets:
                        self._offsets[num] = pos
            trailer = parser.parse_object()
            if not isinstance(trailer, dict):
                raise MalformedPdf("bad trailer dictionary")
            for key, value in trailer.items():
                self.trailer.setdefault(key, value)
            prev = trailer.get("Prev")
            return int(prev) if isinstance(prev, (int, float)) else 0
        # cross-reference *streams* (PDF 1.5 compressed xref) fall outside
        # the supported profile; recover by scanning
        raise MalformedPdf("cross-reference table not found at startxref")

    def _rebuild_offsets(self):
        for m in _OBJ_RE.finditer(self.data):
            self._offsets[int(m.group(1))] = m.start()
        if not self._offsets:
            raise MalformedPdf("no indirect objects found")

    def _find_trailer_by_scan(self):
        idx = self.data.rfind(b"trailer")
        if idx >= 0:
            parser = ObjectParser(self.data, idx + len(b"trailer"))
            try:
                trailer = parser.parse_object()
                if isinstance(trailer, dict):
                    self.trailer = trailer
                    return
            except MalformedPdf:
                pass
        # last resort: find a catalog object directly
        for num in self._offsets:
            try:
                obj = self.get_object(num)
            except MalformedPdf:
                continue
            if isinstance(obj, dict) and obj.get("Type") == "Catalog":
                self.trailer = {"Root": Ref(num, 0)}
                return
        raise MalformedPdf("no trailer and no catalog object")

    # --------------------------------------------------------- objects

    def get_object(self, num: int):
        if num in self._cache:
            return self._cache[num]
        offset = self._offsets.get(num)
        if offset is None:
            return None
        parser = ObjectParser(self.data, offset)
        first = parser.next_token()
        gen = parser.next_token()
        kw = parser.next_token()
        if first != num or not isinstance(gen, int) or kw != "obj":
            # stale offset (e.g. wrong xref); rescan once
            m = _OBJ_RE.search(self.data, max(0, offset - 64))
            raise MalformedPdf(f"object {num} not at offset {offset}"
                               + (f" (next obj at {m.start()})" if m else ""))
        obj = parser.parse_object()
        save = parser.pos
        token = None
        try:
            token = parser.next_token()
        except MalformedPdf:
            parser.pos = save
        if token == "stream":
            obj = self._read_stream(obj, parser)
        self._cache[num] = obj
        return obj

    def _read_stream(self, d, parser: ObjectParser) -> Stream:
        if not isinstance(d, dict):
            raise MalformedPdf("stream without dictionary")
        data = self.data
        pos = parser.pos
        if data[pos : pos + 2] == b"\r\n":
            pos += 2
        elif pos < len(data) and data[pos : pos + 1] in (b"\n", b"\r"):
            pos += 1
        length = self.resolve(d.get("Length"))
        raw = None
        if isinstance(length, int) and length >= 0:
            end = pos + length
            if data[end : end + 32].lstrip()[:9] == b"endstream":
                raw = data[pos:end]
        if raw is None:
            end = data.find(b"endstream", pos)
            if end < 0:
                raise MalformedPdf("unterminated stream")
            raw = data[pos:end].rstrip(b"\r\n")
        return Stream(d, raw)

    def resolve(self, obj, depth: int = 0):
        while isinstance(obj, Ref):
            if depth > 32:
                raise MalformedPdf("reference cycle")
            obj = self.get_object(obj.num)
            depth += 1
        return obj

    def stream_data(self, stream: Stream) -> bytes:
        return decode_stream(stream, self.resolve)

    # ------------------------------------------------------ page tree

    def pages(self) -> list[dict]:
        """Flattened page dictionaries with inherited attributes applied."""
        root = self.resolve(self.catalog.get("Pages"))
        if not isinstance(root, dict):
            raise MalformedPdf("catalog has no page tree")
        out: list[dict] = []
        inheritable = ("Resources", "MediaBox", "CropBox", "Rotate")

        def walk(node: dict, inherited: dict, depth: int):
            if depth > 64:
                raise MalformedPdf("page tree too deep")
            merged = dict(inherited)
            for key in inheritable:
                if key in node:
                    merged[key] = node[key]
            node_type = self.resolve(node.get("Type"))
            if node_type == "Page" or ("Kids" not in node and node_type != "Pages"):
                page = dict(node)
                for key in inheritable:
                    page.setdefault(key, merged.get(key))
                out.append(page)
                return
            kids = self.resolve(node.get("Kids")) or []
            for kid in kids:
                kid = self.resolve(kid)
                if isinstance(kid, dict):
                    walk(kid, merged, depth + 1)

        walk(root, {}, 0)
        return out

    def page_content(self, page: dict) -> bytes:
        contents = self.resolve(page.get("Contents"))
        if contents is None:
            return b""
        if isinstance(contents, Stream):
            return self.stream_data(contents)
        if isinstance(contents, list):
            parts = []
            for item in contents:
                item = self.resolve(item)
                if isinstance(item, Stream):
                    parts.append(self.stream_data(item))
            return b"\n".join(parts)
        raise MalformedPdf("page Contents is neither stream nor array")

    def media_box(self, page: dict) -> tuple[float, float, float, float]:
        box = self.resolve(page.get("MediaBox"))
        if not isinstance(box, list) or len(box) != 4:
            return (0.0, 0.0, 612.0, 792.0)
        vals = [float(self.resolve(v)) for v in box]
        x0, y0, x1, y1 = vals
        return (min(x0, x1), min(y0, y1), max(x0, x1), max(y0, y1))
