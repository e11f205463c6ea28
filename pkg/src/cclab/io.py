"""Text formats: code files, partial functions, tandem protocols, configs and reports.

Code file::

    n m count
    <domain string> <codeword string>     (count lines, ASCII 0/1, bit i = char i)

Tandem file::

    q 2
    query 0:1 1:0 2:1 ...
    query 0:0 1:0 2:2 ...
    rho 0 1 2 3
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .bits import BitString
from .fcodes import PartialF, explicit_code
from .reductions import TandemProtocol


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _content_lines(text):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


# Codes -----------------------------------------------------------------------

def format_code(code):
    items = code.items()
    out = [f"{code.n} {code.m} {len(items)}"]
    for x, w in items:
        out.append(f"{x} {BitString(code.m, w) if code.m else ''}".rstrip())
    return "\n".join(out) + "\n"


def parse_code(text, name="file"):
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty code file: missing header 'n m count'", 1)
    no, header = lines[0]
    try:
        n, m, count = (int(v) for v in header.split())
    except ValueError:
        raise ParseError(f"bad header {header!r}; expected 'n m count'", no) from None
    if count < 1:
        raise ParseError("code domain is empty", no)
    body = lines[1:]
    if len(body) != count:
        raise ParseError(f"header promises {count} entries, found {len(body)}", no)
    pairs, seen = [], set()
    for no, line in body:
        parts = line.split()
        if len(parts) != (2 if m else 1):
            raise ParseError(f"expected '<domain> <codeword>', got {line!r}", no)
        x, w = parts[0], parts[1] if m else ""
        if len(x) != n or set(x) - {"0", "1"}:
            raise ParseError(f"domain string {x!r} is not {n} bits", no)
        if len(w) != m or set(w) - {"0", "1"}:
            raise ParseError(f"codeword {w!r} is not {m} bits", no)
        bx = BitString.from_str(x)
        if bx.value in seen:
            raise ParseError(f"duplicate domain string {x}", no)
        seen.add(bx.value)
        pairs.append((bx, BitString.from_str(w).value if m else 0))
    return explicit_code(n, m, pairs, name=name)


def read_code(path):
    with open(path) as fh:
        return parse_code(fh.read(), name=str(path))


def write_code(code, path):
    with open(path, "w") as fh:
        fh.write(format_code(code))


def parse_partial_f(text):
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty partial function", 1)
    try:
        return PartialF.parse(",".join(line for _, line in lines))
    except ValueError as exc:
        raise ParseError(str(exc), lines[0][0]) from None


def read_partial_f(path):
    with open(path) as fh:
        return parse_partial_f(fh.read())


# Tandem protocols ----------------------------------------------------------------

def format_tandem(t):
    out = [f"q {t.q}"]
    for a in t.queries:
        out.append("query " + " ".join(f"{x}:{v}" for x, v in enumerate(a)))
    out.append("rho " + " ".join(str(v) for v in t.rho))
    return "\n".join(out) + "\n"


def parse_tandem(text):
    q, queries, rho = None, [], None
    for no, line in _content_lines(text):
        key, _, rest = line.partition(" ")
        if key == "q":
            q = int(rest)
        elif key == "query":
            table = {}
            for item in rest.split():
                x, _, v = item.partition(":")
                if not _:
                    raise ParseError(f"bad table item {item!r}; expected input:value", no)
                table[int(x)] = int(v)
            if sorted(table) != list(range(len(table))):
                raise ParseError("query table must cover 0..N-1", no)
            queries.append(tuple(table[x] for x in range(len(table))))
        elif key == "rho":
            rho = tuple(int(v) for v in rest.split())
        else:
            raise ParseError(f"unknown key {key!r}", no)
    if q is None or rho is None or len(queries) != q:
        raise ParseError("tandem file needs 'q', q query lines and 'rho'")
    return TandemProtocol(len(queries[0]), tuple(queries), rho)


# Configs and reports -----------------------------------------------------------

def load_config(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError("config must be a JSON object", 1)
    return data


def _cell(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def format_report(config, summary, header, rows):
    """Config echo and summary as '# key: value' lines, then CSV rows."""
    buf = io.StringIO()
    for key in sorted(config):
        buf.write(f"# config.{key}: {_cell(config[key])}\n")
    for key, value in summary.items():
        buf.write(f"# summary.{key}: {_cell(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def parse_report(text):
    config, summary, body = {}, {}, []
    for line in text.splitlines():
        if line.startswith("# config."):
            k, _, v = line[len("# config."):].partition(": ")
            config[k] = v
        elif line.startswith("# summary."):
            k, _, v = line[len("# summary."):].partition(": ")
            summary[k] = v
        else:
            body.append(line)
    rows = list(csv.reader(body))
    return config, summary, rows[0] if rows else [], rows[1:]


# Composition specs ------------------------------------------------------------

def parse_matrix(text):
    """Dense row-major matrix: header 'N', then N rows of N integer labels."""
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty matrix file", 1)
    no, header = lines[0]
    try:
        N = int(header)
    except ValueError:
        raise ParseError(f"bad header {header!r}; expected the size N", no) from None
    if len(lines) - 1 != N:
        raise ParseError(f"expected {N} rows, found {len(lines) - 1}", no)
    rows = []
    for no, line in lines[1:]:
        try:
            row = tuple(int(v) for v in line.split())
        except ValueError:
            raise ParseError(f"non-integer entry in {line!r}", no) from None
        if len(row) != N:
            raise ParseError(f"row has {len(row)} entries, expected {N}", no)
        rows.append(row)
    return tuple(rows)


def load_composition_spec(path):
    """JSON config: {"matrices": [files], "r": .., "delta": "1/8", "g": {"name": .., ...}, "n": ..}."""
    import os

    from .composition import CompositionSpec, make_g

    cfg = load_config(path)
    base = os.path.dirname(os.path.abspath(path))
    missing = [k for k in ("matrices", "r", "delta", "g") if k not in cfg]
    if missing:
        raise ParseError(f"composition config misses field(s) {missing}")
    mats = []
    for rel in cfg["matrices"]:
        with open(os.path.join(base, rel)) as fh:
            mats.append(parse_matrix(fh.read()))
    g = dict(cfg["g"])
    name = g.pop("name")
    return CompositionSpec(mats, int(cfg["r"]), Fraction(str(cfg["delta"])), make_g(name, **g), n=cfg.get("n"))
