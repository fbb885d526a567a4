"""Symbolic terms and the s-expression reader.

A term is a symbol (lowercased str), a number, or a tuple of terms, e.g.
``("urn", "h2")`` for ``(urn h2)``. Symbols beginning with ``?`` are logical
variables and are only legal inside schema patterns. Symbols are normalized
to lower case on read, so ``(Draw ?n)`` and ``(draw ?N)`` denote the same
pattern.
"""

from __future__ import annotations

import re
from typing import Iterator

from .errors import ParseError

Term = str | int | float | tuple

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")
_ATOM_END = set(" \t\r\n();")


def _classify(token: str) -> Term:
    if _NUMBER.match(token):
        if any(c in token for c in ".eE"):
            return float(token)
        return int(token)
    return token.lower()


def tokenize(text: str) -> Iterator[tuple[str, int, int]]:
    """Yield (token, line, column); tokens are '(', ')' or raw atom text."""
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c, line, col
            i += 1
            col += 1
        else:
            start, start_col = i, col
            while i < n and text[i] not in _ATOM_END:
                i += 1
                col += 1
            yield text[start:i], line, start_col


def read_forms(text: str) -> list[tuple[Term, int, int]]:
    """Read every top-level form in ``text`` with its source position."""
    forms: list[tuple[Term, int, int]] = []
    stack: list[list] = []
    positions: list[tuple[int, int]] = []
    for token, line, col in tokenize(text):
        if token == "(":
            stack.append([])
            positions.append((line, col))
        elif token == ")":
            if not stack:
                raise ParseError("unexpected ')'", line, col)
            items = stack.pop()
            pos = positions.pop()
            form: Term = tuple(items)
            if stack:
                stack[-1].append(form)
            else:
                forms.append((form, pos[0], pos[1]))
        else:
            atom = _classify(token)
            if stack:
                stack[-1].append(atom)
            else:
                forms.append((atom, line, col))
    if stack:
        line, col = positions[-1]
        raise ParseError("unbalanced '(' before end of input", line, col)
    return forms


def parse_term(text: str) -> Term:
    """Parse exactly one term."""
    forms = read_forms(text)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one form, found {len(forms)}")
    return forms[0][0]


def term_to_text(term: Term) -> str:
    if isinstance(term, tuple):
        return "(" + " ".join(term_to_text(t) for t in term) + ")"
    if isinstance(term, float):
        return repr(term)
    return str(term)


def is_variable(term: Term) -> bool:
    return isinstance(term, str) and term.startswith("?")


def is_ground(term: Term) -> bool:
    if isinstance(term, tuple):
        return all(is_ground(t) for t in term)
    return not is_variable(term)


def term_variables(term: Term) -> list[str]:
    """Variables in first-occurrence order."""
    out: list[str] = []

    def walk(t: Term) -> None:
        if isinstance(t, tuple):
            for s in t:
                walk(s)
        elif is_variable(t) and t not in out:
            out.append(t)

    walk(term)
    return out


def substitute(term: Term, binding: dict[str, Term]) -> Term:
    if isinstance(term, tuple):
        return tuple(substitute(t, binding) for t in term)
    if is_variable(term):
        return binding.get(term, term)
    return term


def unify(pattern: Term, ground: Term, binding: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """Match ``pattern`` against a ground term; returns the binding or None."""
    b = dict(binding) if binding else {}

    def walk(p: Term, g: Term) -> bool:
        if is_variable(p):
            if p in b:
                return b[p] == g
            b[p] = g
            return True
        if isinstance(p, tuple):
            if not isinstance(g, tuple) or len(p) != len(g):
                return False
            return all(walk(pi, gi) for pi, gi in zip(p, g))
        return p == g

    return b if walk(pattern, ground) else None


def alpha_canon(term: Term) -> Term:
    """Rename variables to ?1, ?2, ... so alpha-equivalent patterns compare equal."""
    names = {v: f"?{i + 1}" for i, v in enumerate(term_variables(term))}
    return substitute(term, names)


def term_slug(term: Term) -> str:
    """Flat identifier-ish rendering used to build display names."""
    if isinstance(term, tuple):
        return "_".join(term_slug(t) for t in term)
    return str(term)
