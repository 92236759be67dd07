"""Built-in datasets, generated as format A/B text so they go through the parsers."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from itertools import permutations
from pathlib import Path

import numpy as np

from .algebra import FieldSpec, GroupTable, PartitionedAlgebra, build_group_algebra, validate_algebra
from .formats import GroupInput, format_group, parse

BUILTINS = ("ex1", "ex2", "a4", "kx2")
ALIASES = {"exa4": "a4"}


def semidirect_c3c3_c2(name: str, action: tuple[int, int]) -> GroupTable:
    """(C3 x C3) x| C2 where the involution scales the two factors by ``action``."""
    elems = [(a, b, s) for s in range(2) for a in range(3) for b in range(3)]
    index = {x: k for k, x in enumerate(elems)}

    def act(s, a, b):
        return ((a * action[0]) % 3, (b * action[1]) % 3) if s else (a, b)

    table = np.zeros((18, 18), dtype=np.int64)
    for i, (a, b, s) in enumerate(elems):
        for j, (c, d, t) in enumerate(elems):
            c2, d2 = act(s, c, d)
            table[i, j] = index[((a + c2) % 3, (b + d2) % 3, (s + t) % 2)]
    labels = [f"a{a}b{b}" + ("s" if s else "") for a, b, s in elems]
    return GroupTable(name, labels, table, 0)


def alternating_a4() -> GroupTable:
    perms = [p for p in permutations(range(4)) if _sign(p) == 1]
    index = {p: k for k, p in enumerate(perms)}
    table = np.zeros((12, 12), dtype=np.int64)
    for i, x in enumerate(perms):
        for j, y in enumerate(perms):
            # right action convention: apply x, then y
            table[i, j] = index[tuple(y[x[k]] for k in range(4))]
    labels = ["".join(str(v) for v in p) for p in perms]
    return GroupTable("A4", labels, table, 0)


def _sign(p) -> int:
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


KX2_TEXT = """\
ALGEBRA kx2
FIELD p=3 e=1
DIM 2
BASIS 1 x
ONE 1,0
IDEMPOTENTS 1
RADICAL x
MULT 1 1 = 1*1
MULT 1 x = 1*x
MULT x 1 = 1*x
END
"""

# The recurrence a_{s+1} = 3 a_s + 1 with a_0 = a_1 = 2, stated for EX1 alongside a
# closed form with characteristic roots (3 +- sqrt 5)/2.  Reports compare it with
# the computed socle dimensions.
REFERENCE_CLAIMS = {
    "ex1": {
        "context": {"take": ["k"], "target": "eps"},
        "socle_recurrence": {"coefficients": [3], "constant": 1, "initial": [2, 2], "text": "a_{s+1} = 3 a_s + 1"},
        "closed_form_recurrence": {"coefficients": [3, -1], "text": "a_{s+2} = 3 a_{s+1} - a_s (roots (3 +- sqrt 5)/2)"},
    },
}


def builtin_text(name: str) -> str:
    name = ALIASES.get(name.lower(), name.lower())
    if name == "ex1":
        return format_group(semidirect_c3c3_c2("EX1", (2, 2)), FieldSpec(3))
    if name == "ex2":
        return format_group(semidirect_c3c3_c2("EX2", (1, 2)), FieldSpec(3))
    if name == "a4":
        return format_group(alternating_a4(), FieldSpec(2, 2, (1, 1, 1)))
    if name == "kx2":
        return KX2_TEXT
    raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")


@dataclass
class LoadedInput:
    algebra: PartitionedAlgebra
    text: str
    source: str
    kind: str  # "algebra" or "group"
    group: GroupTable | None = None

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()

    @property
    def claims(self) -> dict:
        return REFERENCE_CLAIMS.get(self.source.lower(), {}) if self.source.lower() in BUILTINS else {}


def load_text(text: str, source: str = "<text>") -> LoadedInput:
    parsed = parse(text)
    if isinstance(parsed, GroupInput):
        alg = build_group_algebra(parsed.group, parsed.field)
        return LoadedInput(alg, text, source, "group", parsed.group)
    return LoadedInput(validate_algebra(parsed), text, source, "algebra")


def load(source: str) -> LoadedInput:
    """Load a builtin by name, or a format A/B file by path."""
    name = ALIASES.get(source.lower(), source.lower())
    if name in BUILTINS and not Path(source).exists():
        return load_text(builtin_text(name), name)
    return load_text(Path(source).read_text(), source)
