"""Plain-text readers and writers for JDMs and realizations.

JDM file: ``#`` starts a comment line; the first other line holds the degree
values, the next ``k`` lines the matrix rows.

Realization file: ``v <id> <class-index>`` lines, then ``e <u> <v>`` lines
with ``u < v``; ids are 0-based and contiguous.  Several realizations may be
concatenated, separated by ``# state <i>`` comment lines.
"""

from __future__ import annotations

from pathlib import Path

from .errors import FormatError, JDMError
from .jdm_core import JointDegreeMatrix, Realization


def _content_lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def parse_jdm(text: str) -> JointDegreeMatrix:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty JDM file")
    try:
        degrees = [int(x) for x in lines[0].split()]
        k = len(degrees)
        rows = [[int(x) for x in ln.split()] for ln in lines[1 : 1 + k]]
    except ValueError as exc:
        raise FormatError(f"non-integer token: {exc}") from None
    if len(rows) != k or len(lines) != 1 + k:
        raise FormatError(f"expected {k} matrix rows after the degree line")
    try:
        return JointDegreeMatrix.from_lists(degrees, rows)
    except JDMError as exc:
        raise FormatError(str(exc)) from None


def read_jdm(path) -> JointDegreeMatrix:
    return parse_jdm(Path(path).read_text(encoding="utf-8"))


def format_jdm(J: JointDegreeMatrix) -> str:
    lines = [" ".join(map(str, J.degrees))]
    lines += [" ".join(map(str, row)) for row in J.matrix]
    return "\n".join(lines) + "\n"


def format_realization(G: Realization) -> str:
    lines = [f"v {v} {c}" for v, c in enumerate(G.class_of)]
    lines += [f"e {u} {v}" for u, v in G.key]
    return "\n".join(lines) + "\n"


def format_realizations(graphs) -> str:
    return "".join(f"# state {i}\n" + format_realization(G) for i, G in enumerate(graphs))


def _parse_block(lines: list[str], degrees) -> Realization:
    cls: dict[int, int] = {}
    edges = []
    for ln in lines:
        parts = ln.split()
        try:
            if parts[0] == "v" and len(parts) == 3:
                cls[int(parts[1])] = int(parts[2])
            elif parts[0] == "e" and len(parts) == 3:
                u, v = int(parts[1]), int(parts[2])
                if not u < v:
                    raise FormatError(f"edge line needs u < v: {ln!r}")
                edges.append((u, v))
            else:
                raise FormatError(f"unrecognised line {ln!r}")
        except ValueError:
            raise FormatError(f"non-integer token in {ln!r}") from None
    n = len(cls)
    if sorted(cls) != list(range(n)):
        raise FormatError("vertex ids must be 0-based and contiguous")
    class_of = tuple(cls[v] for v in range(n))
    if degrees is None:
        degrees = _infer_degrees(class_of, edges)
    try:
        return Realization(tuple(degrees), class_of, frozenset(edges))
    except JDMError as exc:
        raise FormatError(str(exc)) from None


def _infer_degrees(class_of, edges) -> tuple[int, ...]:
    deg = [0] * len(class_of)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    k = max(class_of, default=-1) + 1
    per = [set() for _ in range(k)]
    for v, c in enumerate(class_of):
        per[c].add(deg[v])
    if any(len(s) != 1 for s in per):
        raise FormatError("cannot infer class degrees: classes are empty or mixed")
    return tuple(s.pop() for s in per)


def parse_realizations(text: str, degrees=None) -> list[Realization]:
    blocks: list[list[str]] = []
    current: list[str] = []
    for raw in text.splitlines():
        ln = raw.strip()
        if ln.startswith("# state"):
            if current:
                blocks.append(current)
            current = []
        elif ln and not ln.startswith("#"):
            current.append(ln)
    if current:
        blocks.append(current)
    return [_parse_block(b, degrees) for b in blocks]


def parse_realization(text: str, degrees=None) -> Realization:
    out = parse_realizations(text, degrees)
    if len(out) != 1:
        raise FormatError(f"expected one realization, found {len(out)}")
    return out[0]


def read_realization(path, degrees=None) -> Realization:
    return parse_realization(Path(path).read_text(encoding="utf-8"), degrees)
