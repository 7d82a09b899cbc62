"""MWE recognition: detectors, filters and conflict resolvers.

A recognizer is a three-stage cascade.  Detectors enumerate candidate
occurrences of lexicon entries in a token sequence (case-insensitively,
contiguous matches only).  Filters prune candidates; the continuity filter
is always part of the cascade.  Resolvers turn the surviving candidate set
into a conflict-free sequence in which no token belongs to two MWEs.
"""

from __future__ import annotations

from dataclasses import dataclass

DETECTORS = ("exhaustive", "proper-noun", "stop-word")
RESOLVERS = ("longest", "leftmost")

_DETECTOR_KINDS = {
    "exhaustive": None,          # any lexicon kind
    "proper-noun": "proper-noun",
    "stop-word": "stop-word",
}


@dataclass(frozen=True)
class MweOccurrence:
    """A detected MWE: the leaf indices and tokens of its units, plus the
    '+'-joined lowercased form it collapses to."""

    indices: tuple
    tokens: tuple
    kind: str
    joined: str = ""

    def __post_init__(self):
        if len(self.indices) < 2:
            raise ValueError("an MWE occurrence needs >= 2 units")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("unit indices must be strictly increasing")
        if not self.joined:
            object.__setattr__(self, "joined",
                               "+".join(t.lower() for t in self.tokens))

    @property
    def start(self):
        return self.indices[0]

    @property
    def end(self):
        return self.indices[-1]

    def is_continuous(self):
        return self.indices[-1] - self.indices[0] + 1 == len(self.indices)


@dataclass
class RecognizerConfig:
    """A detector/filters/resolver combination.

    Filters are given as strings: "continuous", "more-frequent-as-mwe" or
    "constrain-length(n)".  The continuity filter is inserted first when
    missing, since every cascade works with it.
    """

    detector: str = "exhaustive"
    filters: tuple = ("continuous",)
    resolver: str = "longest"

    def __post_init__(self):
        if self.detector not in DETECTORS:
            raise ValueError("unknown detector %r" % self.detector)
        if self.resolver not in RESOLVERS:
            raise ValueError("unknown resolver %r" % self.resolver)
        filters = tuple(self.filters)
        for name in filters:
            _parse_filter(name)
        if "continuous" not in filters:
            filters = ("continuous",) + filters
        self.filters = filters


def _parse_filter(name):
    if name in ("continuous", "more-frequent-as-mwe"):
        return name, None
    if name.startswith("constrain-length(") and name.endswith(")"):
        try:
            limit = int(name[len("constrain-length("):-1])
        except ValueError:
            raise ValueError("bad filter %r" % name) from None
        if limit < 2:
            raise ValueError("constrain-length limit must be >= 2")
        return "constrain-length", limit
    raise ValueError("unknown filter %r" % name)


# The five recognizer presets evaluated in the experiments.
PRESETS = {
    "rec1": RecognizerConfig("exhaustive", ("continuous", "more-frequent-as-mwe"), "longest"),
    "rec2": RecognizerConfig("exhaustive", ("continuous", "more-frequent-as-mwe"), "leftmost"),
    "rec3": RecognizerConfig("proper-noun", ("continuous",), "longest"),
    "rec4": RecognizerConfig("exhaustive", ("continuous", "constrain-length(2)"), "leftmost"),
    "rec5": RecognizerConfig("stop-word", ("continuous",), "longest"),
}


def detect(lexicon, tokens, detector="exhaustive"):
    """Enumerate every contiguous match of a lexicon entry in `tokens`.

    All matches are returned, overlapping ones included; the proper-noun
    and stop-word detectors restrict the lexicon to entries of that kind.
    Matching is case-insensitive.
    """
    if detector not in DETECTORS:
        raise ValueError("unknown detector %r" % detector)
    wanted = _DETECTOR_KINDS[detector]
    lowered = [t.lower() for t in tokens]
    found = []
    for start, low in enumerate(lowered):
        for entry in lexicon.by_first_unit.get(low, ()):
            if wanted is not None and entry.kind != wanted:
                continue
            end = start + len(entry.units)
            if end > len(tokens):
                continue
            if tuple(lowered[start:end]) == entry.units:
                found.append(MweOccurrence(tuple(range(start, end)),
                                           tuple(tokens[start:end]),
                                           entry.kind))
    return found


def apply_filters(candidates, filters, lexicon):
    """Prune candidates through the ordered filter cascade."""
    out = list(candidates)
    for name in filters:
        kind, param = _parse_filter(name)
        if kind == "continuous":
            out = [c for c in out if c.is_continuous()]
        elif kind == "constrain-length":
            out = [c for c in out if len(c.indices) == param]
        elif kind == "more-frequent-as-mwe":
            out = [c for c in out if _more_frequent_as_mwe(c, lexicon)]
    return out


def _more_frequent_as_mwe(occurrence, lexicon):
    """Keep an occurrence iff the MWE count beats every unit's standalone count."""
    key = tuple(t.lower() for t in occurrence.tokens)
    entry = lexicon.entries.get(key)
    if entry is None:
        return False
    return all(entry.mwe_count > count for count in entry.unit_counts)


def resolve(candidates, resolver="longest"):
    """Resolve conflicts, returning a pairwise index-disjoint sequence.

    longest: repeatedly take the longest remaining candidate (ties broken
    by leftmost start, then lexicographic joined form) and drop whatever
    overlaps it.  leftmost: scan by start index, taking the candidate with
    the smallest start (ties broken by length, then joined form).
    """
    if resolver == "longest":
        order = sorted(candidates,
                       key=lambda c: (-len(c.indices), c.start, c.joined))
    elif resolver == "leftmost":
        order = sorted(candidates,
                       key=lambda c: (c.start, -len(c.indices), c.joined))
    else:
        raise ValueError("unknown resolver %r" % resolver)
    chosen = []
    taken = set()
    for cand in order:
        if taken.isdisjoint(cand.indices):
            chosen.append(cand)
            taken.update(cand.indices)
    chosen.sort(key=lambda c: c.start)
    return chosen


def recognize(lexicon, tokens, config):
    """Full cascade: detect, filter, resolve."""
    candidates = detect(lexicon, tokens, config.detector)
    candidates = apply_filters(candidates, config.filters, lexicon)
    return resolve(candidates, config.resolver)


def rebind_tokens(occurrences, tokens):
    """Re-attach verbatim sentence tokens to occurrences loaded from a file
    (the file stores only the lowercased joined form)."""
    out = []
    for occ in occurrences:
        if occ.indices[-1] >= len(tokens):
            raise ValueError("occurrence %r outside sentence of %d tokens"
                             % (occ.joined, len(tokens)))
        out.append(MweOccurrence(occ.indices,
                                 tuple(tokens[i] for i in occ.indices),
                                 occ.kind))
    return out
