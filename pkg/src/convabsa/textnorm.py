"""Text normalization shared by the domain model, metrics, and flip logic."""

from __future__ import annotations

import unicodedata


def tokenize(text: str) -> list[str]:
    """Whitespace tokens of ``text`` after Unicode NFC normalization."""
    return unicodedata.normalize("NFC", text).split()


def normalize_term(text: str) -> str:
    """Canonical form used for term comparison.

    NFC-normalizes, casefolds, collapses internal whitespace to single
    spaces, and strips trailing whitespace and terminal punctuation.
    """
    text = unicodedata.normalize("NFC", str(text))
    text = " ".join(text.split()).casefold()
    while text:
        last = text[-1]
        if last.isspace() or unicodedata.category(last).startswith("P"):
            text = text[:-1]
        else:
            break
    return text


def norm_tokens(text: str) -> list[str]:
    """Tokens of the normalized form of ``text``."""
    normalized = normalize_term(text)
    return normalized.split(" ") if normalized else []
