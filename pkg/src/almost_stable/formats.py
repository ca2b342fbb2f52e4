"""Text formats for instances and matchings.

Instance file::

    instance <nA> <nB>
    a <i> : <b-indices in preference order>
    b <j> : <a-indices in preference order>

Matching file: one ``<i> <j>`` pair per line meaning A_i - B_j.
``#`` starts a comment; blank lines are ignored in both formats.
"""

from __future__ import annotations

import os
from pathlib import Path

from .core import Matching, PreferenceInstance, validate_instance
from .errors import ParseError


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"line {lineno}: expected integers, got {' '.join(tokens)!r}") from None


def parse_instance(text: str) -> PreferenceInstance:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty instance file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 3 or parts[0] != "instance":
        raise ParseError(f"line {lineno}: expected 'instance <nA> <nB>'")
    n_a, n_b = _ints(parts[1:], lineno)
    if n_a < 0 or n_b < 0:
        raise ParseError(f"line {lineno}: negative agent count")
    lists = {"a": [None] * n_a, "b": [None] * n_b}
    for lineno, line in lines[1:]:
        head, sep, tail = line.partition(":")
        head_tokens = head.split()
        if not sep or len(head_tokens) != 2 or head_tokens[0] not in lists:
            raise ParseError(f"line {lineno}: expected 'a <i> : ...' or 'b <j> : ...'")
        side = head_tokens[0]
        (idx,) = _ints(head_tokens[1:], lineno)
        slots = lists[side]
        if not 1 <= idx <= len(slots):
            raise ParseError(f"line {lineno}: {side} index {idx} out of range")
        if slots[idx - 1] is not None:
            raise ParseError(f"line {lineno}: {side} {idx} given twice")
        slots[idx - 1] = _ints(tail.split(), lineno)
    for side, slots in lists.items():
        for i, lst in enumerate(slots, 1):
            if lst is None:
                raise ParseError(f"missing preference line for {side} {i}")
    return validate_instance(lists["a"], lists["b"], n_a, n_b)


def format_instance(instance: PreferenceInstance) -> str:
    out = [f"instance {instance.n_a} {instance.n_b}"]
    for a, lst in enumerate(instance.prefs_a, 1):
        out.append(f"a {a} : {' '.join(map(str, lst))}".rstrip())
    for b, lst in enumerate(instance.prefs_b, 1):
        out.append(f"b {b} : {' '.join(map(str, lst))}".rstrip())
    return "\n".join(out) + "\n"


def parse_matching(instance: PreferenceInstance, text: str) -> Matching:
    pairs = []
    for lineno, line in _content_lines(text):
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"line {lineno}: expected '<i> <j>'")
        pairs.append(tuple(_ints(tokens, lineno)))
    return Matching(instance, pairs)


def format_matching(matching: Matching) -> str:
    return "".join(f"{a} {b}\n" for a, b in matching.sorted_edges())


def read_instance(path: str | os.PathLike) -> PreferenceInstance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def write_instance(path: str | os.PathLike, instance: PreferenceInstance) -> None:
    Path(path).write_text(format_instance(instance), encoding="utf-8")


def read_matching(path: str | os.PathLike, instance: PreferenceInstance) -> Matching:
    return parse_matching(instance, Path(path).read_text(encoding="utf-8"))


def write_matching(path: str | os.PathLike, matching: Matching) -> None:
    Path(path).write_text(format_matching(matching), encoding="utf-8")
