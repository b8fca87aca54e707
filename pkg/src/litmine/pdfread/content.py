"""Content stream interpreter.

Walks the operator stream of one page and collects, in device space
(PDF bottom-up coordinates): positioned glyphs, stroked/ruled line
segments, and placed image rectangles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import MalformedPdf
from .fonts import SimpleFont
from .objects import Keyword, Lexer, Name, ObjectParser, Stream

Matrix = tuple[float, float, float, float, float, float]

IDENTITY: Matrix = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

# filled rectangles at most this thick (pt) count as drawn rules
THIN_FILL_RULE_PT = 3.0


def mat_mult(m1: Matrix, m2: Matrix) -> Matrix:
    a1, b1, c1, d1, e1, f1 = m1
    a2, b2, c2, d2, e2, f2 = m2
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
        e1 * a2 + f1 * c2 + e2,
        e1 * b2 + f1 * d2 + f2,
    )


def mat_apply(m: Matrix, x: float, y: float) -> tuple[float, float]:
    a, b, c, d, e, f = m
    return (a * x + c * y + e, b * x + d * y + f)


def mat_scale(m: Matrix) -> float:
    a, b, c, d, _, _ = m
    det = abs(a * d - b * c)
    return math.sqrt(det) if det > 0 else 1.0


@dataclass(frozen=True)
class Glyph:
    char: str
    origin_x: float
    origin_y: float
    end_x: float        # origin plus advance
    end_y: float
    box: tuple[float, float, float, float]  # device-space bbox (x0,y0,x1,y1)
    size: float


@dataclass
class PageContent:
    glyphs: list[Glyph] = field(default_factory=list)
    segments: list[tuple[float, float, float, float, float]] = field(default_factory=list)
    images: list[tuple[float, float, float, float]] = field(default_factory=list)


@dataclass
class _TextState:
    font: SimpleFont | None = None
    size: float = 0.0
    char_spacing: float = 0.0
    word_spacing: float = 0.0
    h_scale: float = 1.0
    leading: float = 0.0
    rise: float = 0.0


class _Interpreter:
    def __init__(self, document, resources: dict, out: PageContent, depth: int = 0):
        self.doc = document
        self.resources = resources or {}
        self.out = out
        self.depth = depth
        self.ctm: Matrix = IDENTITY
        self.line_width = 1.0
        self.gs_stack: list[tuple[Matrix, float, _TextState]] = []
        self.text = _TextState()
        self.tm: Matrix = IDENTITY
        self.tlm: Matrix = IDENTITY
        # current path: list of subpaths, each a list of (x, y, from_curve)
        self.path: list[list[tuple[float, float, bool]]] = []
        self._fonts: dict[str, SimpleFont] = {}

    # ------------------------------------------------------- resources

    def _lookup(self, category: str, name: str):
        cat = self.doc.resolve(self.resources.get(category)) or {}
        return self.doc.resolve(cat.get(name))

    def _font(self, name: str) -> SimpleFont:
        if name not in self._fonts:
            fd = self._lookup("Font", name)
            self._fonts[name] = SimpleFont(fd if isinstance(fd, dict) else {}, self.doc.resolve)
        return self._fonts[name]

    # ------------------------------------------------------------ run

    def run(self, content: bytes):
        parser = ObjectParser(content)
        stack: list = []
        while not parser.at_end():
            try:
                token = parser.next_token()
            except MalformedPdf:
                break
            if isinstance(token, Keyword):
                try:
                    self._execute(str(token), stack, parser)
                except MalformedPdf:
                    raise
                except Exception:
                    pass  # tolerate junk operands; keep reading the page
                stack.clear()
            elif token == "<<":
                stack.append(parser._parse_dict())
            elif token == "[":
                stack.append(parser._parse_array())
            elif token in (">>", "]", "{", "}"):
                continue
            else:
                stack.append(token)

    # ------------------------------------------------------ operators

    def _execute(self, op: str, stack: list, parser: ObjectParser):
        if op == "q":
            self.gs_stack.append((self.ctm, self.line_width, _TextState(**vars(self.text))))
        elif op == "Q":
            if self.gs_stack:
                self.ctm, self.line_width, self.text = self.gs_stack.pop()
        elif op == "cm":
            self.ctm = mat_mult(tuple(float(v) for v in stack[-6:]), self.ctm)
        elif op == "w":
            self.line_width = float(stack[-1])
        elif op == "m":
            x, y = float(stack[-2]), float(stack[-1])
            self.path.append([(*mat_apply(self.ctm, x, y), False)])
        elif op == "l":
            x, y = float(stack[-2]), float(stack[-1])
            if self.path:
                self.path[-1].append((*mat_apply(self.ctm, x, y), False))
        elif op in ("c", "v", "y"):
            x, y = float(stack[-2]), float(stack[-1])
            if self.path:
                self.path[-1].append((*mat_apply(self.ctm, x, y), True))
        elif op == "re":
            x, y, w, h = (float(v) for v in stack[-4:])
            pts = [(x, y), (x + w, y), (x + w, y + h), (x, y + h), (x, y)]
            self.path.append([(*mat_apply(self.ctm, px, py), False) for px, py in pts])
        elif op == "h":
            if self.path and len(self.path[-1]) > 2:
                self.path[-1].append(self.path[-1][0])
        elif op in ("S", "s"):
            if op == "s":
                self._execute("h", stack, parser)
            self._stroke_path()
            self.path = []
        elif op in ("f", "F", "f*"):
            self._fill_path()
            self.path = []
        elif op in ("B", "B*", "b", "b*"):
            self._stroke_path()
            self.path = []
        elif op == "n":
            self.path = []
        elif op == "BT":
            self.tm = IDENTITY
            self.tlm = IDENTITY
        elif op == "ET":
            pass
        elif op == "Tf":
            self.text.font = self._font(str(stack[-2]))
            self.text.size = float(stack[-1])
        elif op == "Td":
            self.tlm = mat_mult((1, 0, 0, 1, float(stack[-2]), float(stack[-1])), self.tlm)
            self.tm = self.tlm
        elif op == "TD":
            self.text.leading = -float(stack[-1])
            self._execute("Td", stack, parser)
        elif op == "Tm":
            self.tlm = tuple(float(v) for v in stack[-6:])
            self.tm = self.tlm
        elif op == "T*":
            self.tlm = mat_mult((1, 0, 0, 1, 0.0, -self.text.leading), self.tlm)
            self.tm = self.tlm
        elif op == "TL":
            self.text.leading = float(stack[-1])
        elif op == "Tc":
            self.text.char_spacing = float(stack[-1])
        elif op == "Tw":
            self.text.word_spacing = float(stack[-1])
        elif op == "Tz":
            self.text.h_scale = float(stack[-1]) / 100.0
        elif op == "Ts":
            self.text.rise = float(stack[-1])
        elif op == "Tj":
            if isinstance(stack[-1], bytes):
                self._show(stack[-1])
        elif op == "'":
            self._execute("T*", [], parser)
            if isinstance(stack[-1], bytes):
                self._show(stack[-1])
        elif op == '"':
            self.text.word_spacing = float(stack[-3])
            self.text.char_spacing = float(stack[-2])
            self._execute("T*", [], parser)
            if isinstance(stack[-1], bytes):
                self._show(stack[-1])
        elif op == "TJ":
            if isinstance(stack[-1], list):
                for item in stack[-1]:
                    if isinstance(item, bytes):
                        self._show(item)
                    elif isinstance(item, (int, float)):
                        tx = -float(item) / 1000.0 * self.text.size * self.text.h_scale
                        self.tm = mat_mult((1, 0, 0, 1, tx, 0.0), self.tm)
        elif op == "Do":
            self._do_xobject(str(stack[-1]))
        elif op == "BI":
            self._inline_image(parser)
        # remaining operators (color, clip, marked content, ...) have no
        # geometric output

    # ----------------------------------------------------------- text

    def _show(self, raw: bytes):
        state = self.text
        font = state.font
        if font is None:
            return
        for code in raw:
            w0 = font.width(code)
            ch = font.decode(code)
            param: Matrix = (
                state.size * state.h_scale, 0.0,
                0.0, state.size,
                0.0, state.rise,
            )
            trm = mat_mult(param, mat_mult(self.tm, self.ctm))
            ox, oy = trm[4], trm[5]
            corners = [
                mat_apply(trm, 0.0, font.descent),
                mat_apply(trm, w0, font.descent),
                mat_apply(trm, 0.0, font.ascent),
                mat_apply(trm, w0, font.ascent),
            ]
            xs = [p[0] for p in corners]
            ys = [p[1] for p in corners]
            ex, ey = mat_apply(trm, w0, 0.0)
            # the y-axis image of the text rendering matrix carries the
            # effective (device) font size
            size_dev = math.hypot(trm[2], trm[3])
            self.out.glyphs.append(Glyph(
                char=ch,
                origin_x=ox, origin_y=oy,
                end_x=ex, end_y=ey,
                box=(min(xs), min(ys), max(xs), max(ys)),
                size=size_dev,
            ))
            tx = (w0 * state.size + state.char_spacing
                  + (state.word_spacing if code == 0x20 else 0.0)) * state.h_scale
            self.tm = mat_mult((1, 0, 0, 1, tx, 0.0), self.tm)

    # ----------------------------------------------------------- path

    def _stroke_path(self):
        width = self.line_width * mat_scale(self.ctm)
        for subpath in self.path:
            for (x0, y0, _), (x1, y1, curved) in zip(subpath, subpath[1:]):
                if curved:
                    continue
                if x0 == x1 and y0 == y1:
                    continue
                self.out.segments.append((x0, y0, x1, y1, width))

    def _fill_path(self):
        # a filled axis-aligned sliver is a drawn rule; keep its centerline
        for subpath in self.path:
            pts = [(x, y) for x, y, _ in subpath]
            if len(pts) < 4:
                continue
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            w = max(xs) - min(xs)
            h = max(ys) - min(ys)
            if 0 < h <= THIN_FILL_RULE_PT < w:
                cy = (max(ys) + min(ys)) / 2.0
                self.out.segments.append((min(xs), cy, max(xs), cy, h))
            elif 0 < w <= THIN_FILL_RULE_PT < h:
                cx = (max(xs) + min(xs)) / 2.0
                self.out.segments.append((cx, min(ys), cx, max(ys), w))

    # --------------------------------------------------------- images

    def _unit_square_bbox(self) -> tuple[float, float, float, float]:
        corners = [mat_apply(self.ctm, x, y) for x, y in ((0, 0), (1, 0), (1, 1), (0, 1))]
        xs = [p[0] for p in corners]
        ys = [p[1] for p in corners]
        return (min(xs), min(ys), max(xs), max(ys))

    def _do_xobject(self, name: str):
        xobj = self._lookup("XObject", name)
        if not isinstance(xobj, Stream):
            return
        subtype = self.doc.resolve(xobj.dict.get("Subtype"))
        if subtype == "Image":
            self.out.images.append(self._unit_square_bbox())
        elif subtype == "Form" and self.depth < 8:
            inner = _Interpreter(
                self.doc,
                self.doc.resolve(xobj.dict.get("Resources")) or self.resources,
                self.out,
                self.depth + 1,
            )
            matrix = self.doc.resolve(xobj.dict.get("Matrix"))
            base = self.ctm
            if isinstance(matrix, list) and len(matrix) == 6:
                base = mat_mult(tuple(float(v) for v in matrix), base)
            inner.ctm = base
            inner.run(self.doc.stream_data(xobj))

    def _inline_image(self, parser: ObjectParser):
        # BI <dict entries> ID <binary> EI
        while True:
            token = parser.next_token()
            if token == "ID":
                break
            if isinstance(token, Keyword) and token == "EI":
                return
        data = parser.data
        pos = parser.pos + 1  # single whitespace after ID
        while True:
            idx = data.find(b"EI", pos)
            if idx < 0:
                parser.pos = len(data)
                break
            before_ok = idx == 0 or data[idx - 1] in b"\x00\t\n\x0c\r "
            after = data[idx + 2 : idx + 3]
            after_ok = after == b"" or after in b"\x00\t\n\x0c\r "
            if before_ok and after_ok:
                parser.pos = idx + 2
                break
            pos = idx + 2
        self.out.images.append(self._unit_square_bbox())


def interpret_page(document, page: dict) -> PageContent:
    out = PageContent()
    resources = document.resolve(page.get("Resources")) or {}
    interp = _Interpreter(document, resources, out)
    content = document.page_content(page)
    if content:
        interp.run(content)
    return out
