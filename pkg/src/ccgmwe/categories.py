"""CCG category algebra.

A category is either atomic (``NP``, ``S``, possibly with a feature tag as
in ``S[dcl]``) or a functor built from a result, a slash direction and an
argument, as in ``(S\\NP)/NP``.  Slashes associate to the left, so
``S\\NP/NP`` denotes ``(S\\NP)/NP``; rendering always parenthesizes nested
functors, which is the canonical form used in all file formats.

Categories are immutable values: they can be shared freely between threads
and used as dictionary keys (the chart parser relies on this).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

FORWARD = "/"
BACKWARD = "\\"

_ATOM_RE = re.compile(r"[^\s()/\\\[\]]+")


class CategoryParseError(ValueError):
    """Raised for a malformed category string; carries the offending offset."""

    def __init__(self, message, text, offset):
        super().__init__("%s in %r at offset %d" % (message, text, offset))
        self.text = text
        self.offset = offset


@dataclass(frozen=True)
class Category:
    """An atomic or functor CCG category.

    Atoms set ``atom`` (and optionally ``feature``); functors set
    ``result``, ``direction`` and ``argument``.  Feature tags are preserved
    and compared exactly, with no unification.
    """

    atom: str | None = None
    feature: str | None = None
    result: Category | None = None
    direction: str | None = None
    argument: Category | None = None

    def is_atom(self):
        return self.atom is not None

    def is_functor(self):
        return self.result is not None

    def __str__(self):
        return render(self)

    def __repr__(self):
        return "Category(%r)" % render(self)


def atom(name, feature=None):
    return Category(atom=name, feature=feature)


def functor(result, direction, argument):
    if direction not in (FORWARD, BACKWARD):
        raise ValueError("direction must be '/' or '\\', got %r" % direction)
    return Category(result=result, direction=direction, argument=argument)


@lru_cache(maxsize=None)
def parse_category(text):
    """Parse a category string into a Category tree.

    Slashes are left-associative on the spine; parentheses override.
    Raises CategoryParseError naming the offset of the first problem.
    """
    if not text or text.isspace():
        raise CategoryParseError("empty category", text, 0)
    cat, pos = _parse_spine(text, 0)
    if pos != len(text):
        raise CategoryParseError("trailing characters", text, pos)
    return cat


def _parse_spine(text, pos):
    cat, pos = _parse_operand(text, pos)
    while pos < len(text) and text[pos] in (FORWARD, BACKWARD):
        direction = text[pos]
        arg, pos = _parse_operand(text, pos + 1)
        cat = Category(result=cat, direction=direction, argument=arg)
    return cat, pos


def _parse_operand(text, pos):
    if pos >= len(text):
        raise CategoryParseError("missing operand", text, pos)
    if text[pos] == "(":
        cat, pos = _parse_spine(text, pos + 1)
        if pos >= len(text) or text[pos] != ")":
            raise CategoryParseError("unbalanced parenthesis", text, pos)
        return cat, pos + 1
    match = _ATOM_RE.match(text, pos)
    if match is None:
        raise CategoryParseError("expected an atom", text, pos)
    name = match.group()
    pos = match.end()
    feature = None
    if pos < len(text) and text[pos] == "[":
        end = text.find("]", pos)
        if end < 0:
            raise CategoryParseError("unterminated feature tag", text, pos)
        feature = text[pos + 1:end]
        if not feature:
            raise CategoryParseError("empty feature tag", text, pos)
        pos = end + 1
    return Category(atom=name, feature=feature), pos


@lru_cache(maxsize=None)
def render(cat):
    """Canonical string form; nested functors are fully parenthesized."""
    if cat.is_atom():
        if cat.feature is not None:
            return "%s[%s]" % (cat.atom, cat.feature)
        return cat.atom
    return "%s%s%s" % (_wrap(cat.result), cat.direction, _wrap(cat.argument))


def _wrap(cat):
    text = render(cat)
    return "(%s)" % text if cat.is_functor() else text


def arity(cat):
    """Number of argument slots on the spine of `cat`."""
    count = 0
    while cat.is_functor():
        count += 1
        cat = cat.result
    return count


def target(cat):
    """The atomic result left after peeling every argument."""
    while cat.is_functor():
        cat = cat.result
    return cat


def argument_slot(cat, k):
    """The k-th argument of `cat`, counting the innermost argument as k=1.

    The outermost argument therefore sits at k = arity(cat).  This is the
    numbering used by the arg_k field of dependencies throughout the
    toolkit.  Raises ValueError when k is out of range.
    """
    if k < 1:
        raise ValueError("argument slot must be >= 1, got %d" % k)
    slots = []
    while cat.is_functor():
        slots.append(cat.argument)
        cat = cat.result
    if k > len(slots):
        raise ValueError("slot %d out of range for arity %d" % (k, len(slots)))
    return slots[len(slots) - k]


def is_modifier(cat):
    """True for X/X and X\\X categories, which pass headship to their argument."""
    return cat.is_functor() and cat.result == cat.argument


def apply(fn, arg, direction):
    """Function application.  Returns the result category, or None when the
    pair does not combine (a normal negative outcome, not an error)."""
    if fn.is_functor() and fn.direction == direction and fn.argument == arg:
        return fn.result
    return None


def compose(primary, secondary, direction):
    """Function composition: X/Y with Y/Z gives X/Z (backward mirrored).

    `primary` supplies the outer result, `secondary` the passed-through
    argument.  Returns None when the shapes do not match.
    """
    if not (primary.is_functor() and secondary.is_functor()):
        return None
    if primary.direction != direction or secondary.direction != direction:
        return None
    if primary.argument != secondary.result:
        return None
    return Category(result=primary.result, direction=direction,
                    argument=secondary.argument)


# Binary rule names, in the fixed precedence used when classifying nodes.
FORWARD_APPLY = "fa"
BACKWARD_APPLY = "ba"
FORWARD_COMPOSE = "fc"
BACKWARD_COMPOSE = "bc"


def combine(left, right):
    """All parent categories derivable from a (left, right) pair.

    Returns a list of (rule, parent) tuples in fixed precedence order:
    forward application, backward application, forward composition,
    backward composition.
    """
    out = []
    parent = apply(left, right, FORWARD)
    if parent is not None:
        out.append((FORWARD_APPLY, parent))
    parent = apply(right, left, BACKWARD)
    if parent is not None:
        out.append((BACKWARD_APPLY, parent))
    parent = compose(left, right, FORWARD)
    if parent is not None:
        out.append((FORWARD_COMPOSE, parent))
    parent = compose(right, left, BACKWARD)
    if parent is not None:
        out.append((BACKWARD_COMPOSE, parent))
    return out


def derivation_rule(left, right, parent):
    """The first rule under which `parent` derives from (left, right), or None."""
    for rule, cat in combine(left, right):
        if cat == parent:
            return rule
    return None
