"""Parsing of tuple-list completions returned by the model backend.

Completions carry parenthesized groups like ``(phone, battery life),
(phone, design)``; free text around groups is ignored.  Fields are
split on top-level commas; when a group has more fields than the
requested arity, the overflow is folded back into the final free-text
field, since rationales routinely contain commas.
"""

from __future__ import annotations

from ..dialogue import Sentiment, TriggerType

#: Marker returned when the completion is the literal "None".
NONE = None


class TupleParseError(ValueError):
    """Base class for completion parse failures; carries the bad fragment."""

    def __init__(self, message: str, fragment: str = ""):
        super().__init__(message)
        self.fragment = fragment


class UnbalancedParentheses(TupleParseError):
    pass


class NoTuplesFound(TupleParseError):
    pass


class ArityMismatch(TupleParseError):
    pass


class InvalidLabel(TupleParseError):
    pass


def _is_none_literal(text: str) -> bool:
    trimmed = text.strip()
    if trimmed.endswith("."):
        trimmed = trimmed[:-1]
    trimmed = trimmed.strip().strip("'\"")
    return trimmed.casefold() == "none"


def _top_level_groups(text: str) -> list[str]:
    groups: list[str] = []
    depth = 0
    start = -1
    for i, ch in enumerate(text):
        if ch == "(":
            if depth == 0:
                start = i + 1
            depth += 1
        elif ch == ")":
            if depth == 0:
                raise UnbalancedParentheses(
                    f"unmatched ')' at offset {i}", fragment=text[max(0, i - 20) : i + 1]
                )
            depth -= 1
            if depth == 0:
                groups.append(text[start:i])
    if depth != 0:
        raise UnbalancedParentheses("unclosed '(' in completion", fragment=text[-40:])
    return groups


def _split_top_level(group: str) -> list[str]:
    fields: list[str] = []
    depth = 0
    current: list[str] = []
    for ch in group:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            fields.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    fields.append("".join(current).strip())
    return fields


def parse_tuple_list(
    completion: str,
    arity: int,
    sentiment_positions: frozenset[int] | set[int] = frozenset(),
    trigger_positions: frozenset[int] | set[int] = frozenset(),
    allow_none: bool = False,
) -> list[tuple[str, ...]] | None:
    """Extract the tuples from a completion, validating labeled fields.

    Sentiment-position fields must parse as sentiment labels and
    trigger-position fields as trigger categories; field text is kept
    as written.  With ``allow_none``, a literal "None" completion
    returns the :data:`NONE` marker.
    """
    if arity not in (2, 4, 6):
        raise ValueError(f"unsupported arity: {arity}")
    if allow_none and _is_none_literal(completion):
        return NONE
    groups = _top_level_groups(completion)
    if not groups:
        raise NoTuplesFound("no parenthesized tuple found", fragment=completion[:60])
    tuples: list[tuple[str, ...]] = []
    for group in groups:
        fields = _split_top_level(group)
        if len(fields) < arity:
            raise ArityMismatch(
                f"expected {arity} fields, found {len(fields)}", fragment=group
            )
        if len(fields) > arity:
            fields = fields[: arity - 1] + [", ".join(fields[arity - 1 :])]
        for pos in sentiment_positions:
            try:
                Sentiment.parse(fields[pos])
            except ValueError as e:
                raise InvalidLabel(str(e), fragment=group) from e
        for pos in trigger_positions:
            try:
                TriggerType.parse(fields[pos])
            except ValueError as e:
                raise InvalidLabel(str(e), fragment=group) from e
        tuples.append(tuple(fields))
    return tuples


def format_tuple_list(tuples: list[tuple[str, ...]] | None) -> str:
    """Inverse of :func:`parse_tuple_list` for paren-free fields."""
    if not tuples:
        return "None"
    return ", ".join("(" + ", ".join(fields) + ")" for fields in tuples)
