"""Tokenizer and parser for the PDF object syntax (COS objects).

Objects map onto Python natives: dictionaries keyed by Name, lists,
bytes for strings, int/float, bool, None. Indirect references become
``Ref``; streams become ``Stream`` with the raw (still encoded) bytes.
"""

from __future__ import annotations

import base64
import zlib
from typing import NamedTuple

from ..errors import MalformedPdf

_WHITESPACE = b"\x00\t\n\x0c\r "
_DELIMITERS = b"()<>[]{}/%"


class Name(str):
    """A PDF name token (the /Slash kind), distinct from string data."""

    __slots__ = ()


class Ref(NamedTuple):
    num: int
    gen: int


class Stream:
    __slots__ = ("dict", "raw")

    def __init__(self, d: dict, raw: bytes):
        self.dict = d
        self.raw = raw

    def __repr__(self):  # pragma: no cover
        return f"Stream({self.dict!r}, {len(self.raw)} raw bytes)"


class Keyword(str):
    """Bare keyword token (operator names, obj/endobj markers)."""

    __slots__ = ()


def is_regular(ch: int) -> bool:
    return ch not in _WHITESPACE and ch not in _DELIMITERS


class Lexer:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def _skip_ws(self):
        data, n = self.data, len(self.data)
        while self.pos < n:
            ch = data[self.pos]
            if ch in _WHITESPACE:
                self.pos += 1
            elif ch == 0x25:  # '%' comment runs to end of line
                while self.pos < n and data[self.pos] not in b"\r\n":
                    self.pos += 1
            else:
                return

    def at_end(self) -> bool:
        self._skip_ws()
        return self.pos >= len(self.data)

    def peek_byte(self) -> int:
        self._skip_ws()
        if self.pos >= len(self.data):
            raise MalformedPdf("unexpected end of data")
        return self.data[self.pos]

    def next_token(self):
        """Return the next token: number, Name, bytes, Keyword or a
        structural marker ('<<', '>>', '[', ']')."""
        self._skip_ws()
        data = self.data
        if self.pos >= len(data):
            raise MalformedPdf("unexpected end of data")
        ch = data[self.pos]
        if ch == 0x2F:  # /
            return self._read_name()
        if ch == 0x28:  # (
            return self._read_literal_string()
        if ch == 0x3C:  # <
            if data[self.pos : self.pos + 2] == b"<<":
                self.pos += 2
                return "<<"
            return self._read_hex_string()
        if ch == 0x3E:  # >
            if data[self.pos : self.pos + 2] == b">>":
                self.pos += 2
                return ">>"
            raise MalformedPdf(f"stray '>' at offset {self.pos}")
        if ch == 0x5B:  # [
            self.pos += 1
            return "["
        if ch == 0x5D:  # ]
            self.pos += 1
            return "]"
        if ch in b"{}":
            self.pos += 1
            return chr(ch)
        if ch in b"+-.0123456789":
            return self._read_number()
        return self._read_keyword()

    def _read_name(self) -> Name:
        data = self.data
        self.pos += 1
        out = bytearray()
        while self.pos < len(data) and is_regular(data[self.pos]):
            ch = data[self.pos]
            if ch == 0x23 and self.pos + 2 < len(data):  # '#' hex escape
                try:
                    out.append(int(data[self.pos + 1 : self.pos + 3], 16))
                    self.pos += 3
                    continue
                except ValueError:
                    pass
            out.append(ch)
            self.pos += 1
        return Name(out.decode("latin-1"))

    def _read_number(self):
        data = self.data
        start = self.pos
        self.pos += 1
        while self.pos < len(data) and data[self.pos] in b".0123456789+-eE":
            self.pos += 1
        text = data[start : self.pos]
        try:
            if b"." in text or b"e" in text or b"E" in text:
                return float(text)
            return int(text)
        except ValueError as exc:
            raise MalformedPdf(f"bad number {text!r} at {start}") from exc

    def _read_keyword(self) -> Keyword:
        data = self.data
        start = self.pos
        while self.pos < len(data) and is_regular(data[self.pos]):
            self.pos += 1
        if self.pos == start:
            raise MalformedPdf(f"unparseable byte {data[start]!r} at {start}")
        return Keyword(data[start : self.pos].decode("latin-1"))

    def _read_literal_string(self) -> bytes:
        data = self.data
        self.pos += 1
        out = bytearray()
        depth = 1
        while self.pos < len(data):
            ch = data[self.pos]
            self.pos += 1
            if ch == 0x5C:  # backslash
                if self.pos >= len(data):
                    break
                esc = data[self.pos]
                self.pos += 1
                if esc in b"nrtbf":
                    out.append({0x6E: 10, 0x72: 13, 0x74: 9, 0x62: 8, 0x66: 12}[esc])
                elif esc in b"01234567":
                    digits = bytes([esc])
                    while len(digits) < 3 and self.pos < len(data) and data[self.pos] in b"01234567":
                        digits += bytes([data[self.pos]])
                        self.pos += 1
                    out.append(int(digits, 8) & 0xFF)
                elif esc in b"\r\n":  # line continuation
                    if esc == 0x0D and self.pos < len(data) and data[self.pos] == 0x0A:
                        self.pos += 1
                else:
                    out.append(esc)
            elif ch == 0x28:
                depth += 1
                out.append(ch)
            elif ch == 0x29:
                depth -= 1
                if depth == 0:
                    return bytes(out)
                out.append(ch)
            else:
                out.append(ch)
        raise MalformedPdf("unterminated literal string")

    def _read_hex_string(self) -> bytes:
        data = self.data
        self.pos += 1
        digits = bytearray()
        while self.pos < len(data):
            ch = data[self.pos]
            self.pos += 1
            if ch == 0x3E:  # >
                if len(digits) % 2:
                    digits.append(0x30)
                try:
                    return bytes.fromhex(digits.decode("ascii"))
                except ValueError as exc:
                    raise MalformedPdf("bad hex string") from exc
            if ch not in _WHITESPACE:
                digits.append(ch)
        raise MalformedPdf("unterminated hex string")


class ObjectParser(Lexer):
    """Parses full objects, folding `N G R` into Ref."""

    def parse_object(self):
        token = self.next_token()
        return self._continue(token)

    def _continue(self, token):
        if token == "<<":
            return self._parse_dict()
        if token == "[":
            return self._parse_array()
        if isinstance(token, Keyword):
            if token == "true":
                return True
            if token == "false":
                return False
            if token == "null":
                return None
            raise MalformedPdf(f"unexpected keyword {token!r} at {self.pos}")
        if isinstance(token, int):
            return self._maybe_ref(token)
        return token

    def _maybe_ref(self, first: int):
        save = self.pos
        try:
            second = self.next_token()
            if isinstance(second, int):
                third = self.next_token()
                if third == "R":
                    return Ref(first, second)
        except MalformedPdf:
            pass
        self.pos = save
        return first

    def _parse_dict(self) -> dict:
        out: dict = {}
        while True:
            token = self.next_token()
            if token == ">>":
                return out
            if not isinstance(token, Name):
                raise MalformedPdf(f"dict key is not a name: {token!r}")
            out[str(token)] = self.parse_object()

    def _parse_array(self) -> list:
        out: list = []
        while True:
            token = self.next_token()
            if token == "]":
                return out
            out.append(self._continue(token))


def decode_stream(stream: Stream, resolve) -> bytes:
    """Apply the stream's filter chain. Supports Flate and ASCII85."""
    filters = resolve(stream.dict.get("Filter"))
    if filters is None:
        return stream.raw
    if not isinstance(filters, list):
        filters = [filters]
    parms = resolve(stream.dict.get("DecodeParms"))
    if parms is not None and not isinstance(parms, list):
        parms = [parms]
    data = stream.raw
    for i, filt in enumerate(filters):
        filt = resolve(filt)
        parm = resolve(parms[i]) if parms and i < len(parms) else None
        if filt == "FlateDecode":
            try:
                data = zlib.decompress(data)
            except zlib.error as exc:
                raise MalformedPdf(f"bad Flate stream: {exc}") from exc
            if parm and resolve(parm.get("Predictor", 1)) not in (None, 1):
                raise MalformedPdf("flate predictors are not supported")
        elif filt == "ASCII85Decode":
            tail = data.rstrip(_WHITESPACE)
            if not tail.endswith(b"~>"):
                tail += b"~>"
            try:
                data = base64.a85decode(tail, adobe=True, ignorechars=_WHITESPACE)
            except ValueError as exc:
                raise MalformedPdf(f"bad ASCII85 stream: {exc}") from exc
        elif filt == "ASCIIHexDecode":
            hexpart = data.split(b">")[0]
            hexpart = bytes(ch for ch in hexpart if ch not in _WHITESPACE)
            if len(hexpart) % 2:
                hexpart += b"0"
            data = bytes.fromhex(hexpart.decode("ascii", "replace"))
        elif filt in ("DCTDecode", "JPXDecode", "CCITTFaxDecode", "JBIG2Decode"):
            # image payloads; geometry never needs the pixels
            return data
        else:
            raise MalformedPdf(f"unsupported stream filter {filt}")
    return data
