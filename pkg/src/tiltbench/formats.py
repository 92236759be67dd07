"""Line-oriented input formats.

Format A (partitioned algebra)::

    ALGEBRA <name>
    FIELD p=<p> e=<e> [poly=<c0,..,ce>]
    DIM <n>
    BASIS <n labels>
    ONE <n comma-separated scalars>
    IDEMPOTENTS <labels>
    RADICAL <labels>
    MULT <a> <b> = <coeff>*<label> [+ ...]     # omitted products are zero
    END

Format B (finite group)::

    GROUP <name>
    FIELD ...
    ORDER <n>
    ELEMENTS <labels>          # first = identity
    TABLE
    <n rows of n indices>
    END

Scalars are integers: ``0 <= c < q`` is the canonical code, a negative
integer ``-c`` denotes the additive inverse of ``c`` in the prime subfield.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FieldSpec, GroupTable, RawAlgebra


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class GroupInput:
    group: GroupTable
    field: FieldSpec


def _lines(text: str):
    for k, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield k, line


def _int(tok: str, what: str, line: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"{what} needs an integer, got {tok!r}", line) from None
    if v < 0:
        raise ParseError(f"{what} must be non-negative", line)
    return v


def _scalar(tok: str, spec: FieldSpec, line: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"bad scalar {tok!r}", line) from None
    q = spec.p**spec.e
    if v >= 0:
        if v >= q:
            raise ParseError(f"scalar {v} out of range for field of size {q}", line)
        return v
    return (-(-v % spec.p)) % spec.p


def _parse_field(rest: str, line: int) -> FieldSpec:
    opts = {}
    for tok in rest.split():
        if "=" not in tok:
            raise ParseError(f"bad FIELD option {tok!r}", line)
        key, val = tok.split("=", 1)
        opts[key] = val
    try:
        p = int(opts["p"])
        e = int(opts.get("e", "1"))
        poly = tuple(int(c) for c in opts["poly"].split(",")) if "poly" in opts else None
    except (KeyError, ValueError):
        raise ParseError("FIELD needs p=<prime> [e=<degree>] [poly=<c0,..,ce>]", line) from None
    if e > 1 and poly is None:
        from .linalg import first_irreducible

        poly = tuple(first_irreducible(p, e))
    spec = FieldSpec(p, e, poly if e > 1 else None)
    try:
        spec.build()
    except ValueError as exc:
        raise ParseError(str(exc), line) from None
    return spec


def parse(text: str):
    """Parse format A or B; returns :class:`RawAlgebra` or :class:`GroupInput`."""
    lines = list(_lines(text))
    if not lines:
        raise ParseError("unexpected end of file", 1)
    head = lines[0][1].split(None, 1)[0]
    if head == "ALGEBRA":
        return parse_algebra(lines)
    if head == "GROUP":
        return parse_group(lines)
    raise ParseError(f"expected ALGEBRA or GROUP, got {head!r}", lines[0][0])


def parse_algebra(lines) -> RawAlgebra:
    name = spec = None
    dim = None
    labels: list[str] | None = None
    one = idem = rad = None
    products: dict[tuple[str, str], dict[str, int]] = {}
    ended = False
    for k, line in lines:
        if ended:
            raise ParseError("content after END", k)
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "ALGEBRA":
            name = rest or "algebra"
        elif key == "FIELD":
            spec = _parse_field(rest, k)
        elif key == "DIM":
            dim = _int(rest, "DIM", k)
        elif key == "BASIS":
            labels = rest.split()
            if dim is not None and len(labels) != dim:
                raise ParseError(f"BASIS has {len(labels)} labels, DIM says {dim}", k)
        elif key == "ONE":
            if spec is None:
                raise ParseError("FIELD must precede ONE", k)
            one = [_scalar(t.strip(), spec, k) for t in rest.split(",")]
        elif key == "IDEMPOTENTS":
            idem = rest.split()
        elif key == "RADICAL":
            rad = rest.split()
        elif key == "MULT":
            if spec is None:
                raise ParseError("FIELD must precede MULT", k)
            lhs, eq, rhs = rest.partition("=")
            pair = lhs.split()
            if not eq or len(pair) != 2:
                raise ParseError("MULT needs '<a> <b> = <terms>'", k)
            terms: dict[str, int] = {}
            for term in rhs.split("+"):
                term = term.strip()
                if not term:
                    continue
                if "*" in term:
                    c, lab = term.split("*", 1)
                    c = _scalar(c.strip(), spec, k)
                else:
                    c, lab = 1, term
                lab = lab.strip()
                terms[lab] = c if lab not in terms else spec.build().add(terms[lab], c).item()
            key2 = (pair[0], pair[1])
            if key2 in products:
                raise ParseError(f"duplicate MULT for {pair[0]} {pair[1]}", k)
            products[key2] = terms
        elif key == "END":
            ended = True
        else:
            raise ParseError(f"unknown keyword {key!r}", k)
    if not ended:
        raise ParseError("unexpected end of file (missing END)", lines[-1][0])
    missing = [kw for kw, v in (("FIELD", spec), ("BASIS", labels), ("ONE", one), ("IDEMPOTENTS", idem), ("RADICAL", rad)) if v is None]
    if missing:
        raise ParseError(f"missing {', '.join(missing)}")
    if dim is not None and dim != len(labels):
        raise ParseError(f"DIM {dim} does not match {len(labels)} basis labels")
    return RawAlgebra(name, spec, labels, one, idem, rad, products)


def parse_group(lines) -> GroupInput:
    name = spec = None
    order = None
    labels = None
    rows: list[list[int]] = []
    in_table = False
    ended = False
    for k, line in lines:
        if ended:
            raise ParseError("content after END", k)
        key, _, rest = line.partition(" ")
        if in_table and key != "END":
            try:
                rows.append([int(t) for t in line.split()])
            except ValueError:
                raise ParseError("TABLE rows must be integer indices", k) from None
            if order is not None and len(rows[-1]) != order:
                raise ParseError(f"TABLE row has {len(rows[-1])} entries, expected {order}", k)
            continue
        if key == "GROUP":
            name = rest.strip() or "group"
        elif key == "FIELD":
            spec = _parse_field(rest, k)
        elif key == "ORDER":
            order = _int(rest.strip(), "ORDER", k)
        elif key == "ELEMENTS":
            labels = rest.split()
        elif key == "TABLE":
            in_table = True
        elif key == "END":
            ended = True
            in_table = False
        else:
            raise ParseError(f"unknown keyword {key!r}", k)
    if not ended:
        raise ParseError("unexpected end of file (missing END)", lines[-1][0])
    if spec is None or order is None or labels is None:
        raise ParseError("GROUP needs FIELD, ORDER and ELEMENTS")
    if len(labels) != order or len(rows) != order:
        raise ParseError(f"ORDER {order} does not match ELEMENTS/TABLE sizes")
    return GroupInput(GroupTable(name, labels, np.array(rows, dtype=np.int64), 0), spec)


def _field_line(spec: FieldSpec) -> str:
    line = f"FIELD p={spec.p} e={spec.e}"
    if spec.e > 1:
        line += " poly=" + ",".join(str(c) for c in spec.modulus)
    return line


def format_group(g: GroupTable, spec: FieldSpec) -> str:
    out = [f"GROUP {g.name}", _field_line(spec), f"ORDER {g.order}", "ELEMENTS " + " ".join(g.labels), "TABLE"]
    out += [" ".join(str(int(x)) for x in row) for row in g.table]
    out.append("END")
    return "\n".join(out) + "\n"


def format_algebra(a) -> str:
    """Format A text for a :class:`PartitionedAlgebra`."""
    out = [f"ALGEBRA {a.name}", _field_line(a.field_spec), f"DIM {a.dim}", "BASIS " + " ".join(a.labels)]
    out.append("ONE " + ",".join(str(int(x)) for x in a.one))
    out.append("IDEMPOTENTS " + " ".join(a.labels[i] for i in a.idem))
    out.append("RADICAL " + " ".join(a.labels[i] for i in a.rad))
    for x in range(a.dim):
        for y in range(a.dim):
            v = a.mult[x, y]
            nz = np.nonzero(v)[0]
            if nz.size:
                terms = " + ".join(f"{int(v[c])}*{a.labels[c]}" for c in nz)
                out.append(f"MULT {a.labels[x]} {a.labels[y]} = {terms}")
    out.append("END")
    return "\n".join(out) + "\n"
