"""Data model and serialization for derivation trees, dependencies, token
files and MWE lexicons.

File formats (all UTF-8):

* Treebank: per sentence a line ``ID <id>`` followed by one line with a
  parenthesized tree, ``(CAT child child)`` for internal nodes and
  ``(CAT token)`` for leaves.  Category strings follow categories.py and
  contain no whitespace; tokens contain neither whitespace nor parentheses.
* Dependencies: per sentence a line ``ID <id>`` followed by one line per
  edge, tab-separated ``i j cat_j arg_k word_i word_j``.  Indices are
  1-based in files and 0-based in memory.
* Token file: one sentence per line, space-separated; collapsed MWE units
  are joined by '+'.
* Lexicon: tab-separated ``unit1 unit2 ...  kind  mwe-count  c1;c2;...``.
* Occurrences: tab-separated ``sentence-id  i1,i2,...  joined  kind``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .categories import Category, arity, derivation_rule, parse_category, render

LEXICON_KINDS = ("proper-noun", "stop-word", "general")


class TreebankFormatError(ValueError):
    pass


class LexiconError(ValueError):
    pass


@dataclass
class DerivationTree:
    """A derivation node: binary, unary, or a leaf carrying a token.

    Leaf indices are assigned left to right on read (or by
    assign_leaf_indices after construction).  Internal binary nodes need
    not be derivable by a combinatory rule; see is_derivable.
    """

    category: Category
    children: tuple = ()
    token: str | None = None
    leaf_index: int | None = None

    def is_leaf(self):
        return self.token is not None

    def copy(self):
        return DerivationTree(self.category,
                              tuple(child.copy() for child in self.children),
                              self.token, self.leaf_index)


@dataclass
class Dependency:
    """The 6-tuple <i, j, cat_j, arg_k, word_i, word_j>: word_i at leaf i
    fills the k-th argument slot of the functor word_j at leaf j."""

    i: int
    j: int
    cat_j: Category
    arg_k: int
    word_i: str
    word_j: str

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("dependency endpoints must differ (i=j=%d)" % self.i)
        if self.arg_k < 1:
            raise ValueError("arg_k must be >= 1, got %d" % self.arg_k)

    def key(self):
        return (self.i, self.j, render(self.cat_j), self.arg_k,
                self.word_i, self.word_j)


@dataclass
class SentenceRecord:
    sid: str
    tree: DerivationTree | None = None
    tokens: list = field(default_factory=list)
    dependencies: list | None = None


def is_derivable(node):
    """Whether a node's category follows from its children by application
    or composition.  Leaves and unary nodes count as derivable; collapsed
    or punctuation/apposition nodes in synthetic trees may not be."""
    if len(node.children) != 2:
        return True
    left, right = node.children
    return derivation_rule(left.category, right.category,
                           node.category) is not None


def leaf_nodes(tree):
    """Leaf nodes of `tree` in left-to-right order."""
    out = []
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.is_leaf():
            out.append(node)
        else:
            stack.extend(reversed(node.children))
    return out


def leaves(tree):
    """The (index, token) sequence of the tree's leaves, left to right."""
    return [(index, node.token) for index, node in enumerate(leaf_nodes(tree))]


def assign_leaf_indices(tree):
    """(Re)number the leaves 0..n-1 left to right; returns the tree."""
    for index, node in enumerate(leaf_nodes(tree)):
        node.leaf_index = index
    return tree


def _spans(tree):
    """Map node -> (lo, hi) inclusive leaf-index range; leaves are contiguous."""
    spans = {}

    def walk(node, offset):
        if node.is_leaf():
            spans[id(node)] = (offset, offset)
            return offset + 1
        for child in node.children:
            offset = walk(child, offset)
        lo = spans[id(node.children[0])][0]
        hi = spans[id(node.children[-1])][1]
        spans[id(node)] = (lo, hi)
        return offset

    walk(tree, 0)
    return spans


def lowest_dominating_node(tree, indices):
    """The lowest node whose leaf span contains all `indices`.

    Returns (node, spans_only) where spans_only is True iff the node's
    leaves are exactly the given indices.  Unary chains are transparent:
    the deepest dominating node is returned.
    """
    if not indices:
        raise ValueError("indices must be non-empty")
    lo, hi = min(indices), max(indices)
    spans = _spans(tree)
    if hi > spans[id(tree)][1]:
        raise ValueError("leaf index %d outside tree" % hi)
    node = tree
    while not node.is_leaf():
        inside = [c for c in node.children
                  if spans[id(c)][0] <= lo and hi <= spans[id(c)][1]]
        if not inside:
            break
        node = inside[0]
    node_lo, node_hi = spans[id(node)]
    spans_only = (node_lo == lo and node_hi == hi
                  and len(indices) == hi - lo + 1)
    return node, spans_only


# ----------------------------------------------------------------------
# Tree serialization
# ----------------------------------------------------------------------

def parse_tree(text, where=""):
    """Parse one bracketed tree line."""
    tree, pos = _parse_node(text, 0, where)
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if pos != len(text):
        raise TreebankFormatError("%strailing text after tree at column %d"
                                  % (where, pos))
    return assign_leaf_indices(tree)


def _parse_node(text, pos, where):
    if pos >= len(text) or text[pos] != "(":
        raise TreebankFormatError("%sexpected '(' at column %d" % (where, pos))
    pos += 1
    end = pos
    while end < len(text) and not text[end].isspace():
        end += 1
    cat_text = text[pos:end]
    if not cat_text:
        raise TreebankFormatError("%smissing category at column %d" % (where, pos))
    try:
        category = parse_category(cat_text)
    except ValueError as exc:
        raise TreebankFormatError("%s%s" % (where, exc)) from exc
    pos = end
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if pos < len(text) and text[pos] == "(":
        children = []
        while pos < len(text) and text[pos] == "(":
            child, pos = _parse_node(text, pos, where)
            children.append(child)
            while pos < len(text) and text[pos].isspace():
                pos += 1
        if pos >= len(text) or text[pos] != ")":
            raise TreebankFormatError("%sunbalanced bracket at column %d"
                                      % (where, pos))
        if len(children) > 2:
            raise TreebankFormatError("%snode with %d children at column %d"
                                      % (where, len(children), pos))
        return DerivationTree(category, tuple(children)), pos + 1
    end = pos
    while end < len(text) and text[end] not in (")", " ", "\t"):
        end += 1
    token = text[pos:end]
    if not token:
        raise TreebankFormatError("%sempty leaf token at column %d" % (where, pos))
    pos = end
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if pos >= len(text) or text[pos] != ")":
        raise TreebankFormatError("%sunbalanced bracket at column %d" % (where, pos))
    return DerivationTree(category, (), token), pos + 1


def render_tree(tree):
    if tree.is_leaf():
        return "(%s %s)" % (render(tree.category), tree.token)
    return "(%s %s)" % (render(tree.category),
                        " ".join(render_tree(c) for c in tree.children))


def read_treebank(source):
    """Read a treebank (path or open stream) into SentenceRecords; tokens
    come from the tree leaves."""
    records = []
    sid = None
    handle = source if hasattr(source, "read") else open(source, encoding="utf-8")
    try:
        for lineno, raw in enumerate(handle, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("ID "):
                if sid is not None:
                    raise TreebankFormatError(
                        "line %d: sentence %s has no tree" % (lineno, sid))
                sid = line[3:].strip()
                if not sid:
                    raise TreebankFormatError("line %d: empty sentence id" % lineno)
            else:
                if sid is None:
                    raise TreebankFormatError(
                        "line %d: tree without an ID header" % lineno)
                tree = parse_tree(line, where="line %d: " % lineno)
                tokens = [token for _, token in leaves(tree)]
                records.append(SentenceRecord(sid, tree, tokens))
                sid = None
    finally:
        if handle is not source:
            handle.close()
    if sid is not None:
        raise TreebankFormatError("sentence %s has no tree" % sid)
    return records


def write_treebank(path, records):
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write("ID %s\n" % record.sid)
            handle.write(render_tree(record.tree) + "\n")


# ----------------------------------------------------------------------
# Dependency files
# ----------------------------------------------------------------------

def read_dependencies(path):
    """Read a dependency file into a list of (sentence id, [Dependency])."""
    out = []
    current = None
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("ID "):
                current = []
                out.append((line[3:].strip(), current))
                continue
            if current is None:
                raise TreebankFormatError(
                    "line %d: dependency without an ID header" % lineno)
            fields = line.split("\t")
            if len(fields) != 6:
                raise TreebankFormatError(
                    "line %d: expected 6 tab-separated fields, got %d"
                    % (lineno, len(fields)))
            try:
                i, j, arg_k = int(fields[0]), int(fields[1]), int(fields[3])
            except ValueError as exc:
                raise TreebankFormatError("line %d: %s" % (lineno, exc)) from exc
            if i < 1 or j < 1:
                raise TreebankFormatError(
                    "line %d: file indices are 1-based" % lineno)
            try:
                cat_j = parse_category(fields[2])
            except ValueError as exc:
                raise TreebankFormatError("line %d: %s" % (lineno, exc)) from exc
            if arg_k > arity(cat_j):
                raise TreebankFormatError(
                    "line %d: arg_k %d exceeds arity of %s"
                    % (lineno, arg_k, fields[2]))
            current.append(Dependency(i - 1, j - 1, cat_j, arg_k,
                                      fields[4], fields[5]))
    return out


def write_dependencies(path, items):
    """Write (sentence id, [Dependency]) pairs; indices become 1-based."""
    with open(path, "w", encoding="utf-8") as handle:
        for sid, deps in items:
            handle.write("ID %s\n" % sid)
            for dep in deps:
                handle.write("%d\t%d\t%s\t%d\t%s\t%s\n"
                             % (dep.i + 1, dep.j + 1, render(dep.cat_j),
                                dep.arg_k, dep.word_i, dep.word_j))


# ----------------------------------------------------------------------
# Token files
# ----------------------------------------------------------------------

def read_tokens(path):
    with open(path, encoding="utf-8") as handle:
        return [line.split() for line in handle if line.strip()]


def write_tokens(path, sentences):
    with open(path, "w", encoding="utf-8") as handle:
        for tokens in sentences:
            handle.write(" ".join(tokens) + "\n")


# ----------------------------------------------------------------------
# MWE lexicon
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LexiconEntry:
    units: tuple
    kind: str
    mwe_count: int
    unit_counts: tuple


class MweLexicon:
    """An index of known MWEs keyed by their lowercased unit sequence."""

    def __init__(self, entries=()):
        self.entries = {}
        self.by_first_unit = {}
        for entry in entries:
            self.add(entry)

    def add(self, entry):
        if len(entry.units) < 2:
            raise LexiconError("an MWE needs at least 2 units: %r" % (entry.units,))
        if entry.kind not in LEXICON_KINDS:
            raise LexiconError("unknown kind %r" % entry.kind)
        if entry.mwe_count < 0 or any(c < 0 for c in entry.unit_counts):
            raise LexiconError("negative count for %r" % (entry.units,))
        if len(entry.unit_counts) != len(entry.units):
            raise LexiconError("unit count list does not match %r" % (entry.units,))
        key = tuple(u.lower() for u in entry.units)
        if key in self.entries:
            raise LexiconError("duplicate entry %r" % (key,))
        entry = LexiconEntry(key, entry.kind, entry.mwe_count,
                             tuple(entry.unit_counts))
        self.entries[key] = entry
        self.by_first_unit.setdefault(key[0], []).append(entry)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries.values())


def read_lexicon(path):
    lexicon = MweLexicon()
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise LexiconError("line %d: expected 4 tab-separated fields"
                                   % lineno)
            units = tuple(fields[0].split())
            try:
                mwe_count = int(fields[2])
                unit_counts = tuple(int(c) for c in fields[3].split(";"))
            except ValueError as exc:
                raise LexiconError("line %d: %s" % (lineno, exc)) from exc
            try:
                lexicon.add(LexiconEntry(units, fields[1], mwe_count, unit_counts))
            except LexiconError as exc:
                raise LexiconError("line %d: %s" % (lineno, exc)) from exc
    return lexicon


def write_lexicon(path, lexicon):
    with open(path, "w", encoding="utf-8") as handle:
        for key in sorted(lexicon.entries):
            entry = lexicon.entries[key]
            handle.write("%s\t%s\t%d\t%s\n"
                         % (" ".join(entry.units), entry.kind, entry.mwe_count,
                            ";".join(str(c) for c in entry.unit_counts)))


# ----------------------------------------------------------------------
# Occurrence files (sentence id + unit indices of recognized MWEs)
# ----------------------------------------------------------------------

def read_occurrences(path):
    """Read an occurrence file into {sentence id: [MweOccurrence]}."""
    from .recognition import MweOccurrence

    out = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise TreebankFormatError(
                    "line %d: expected 4 tab-separated fields" % lineno)
            sid = fields[0]
            indices = tuple(int(x) for x in fields[1].split(","))
            tokens = tuple(fields[2].split("+"))
            occ = MweOccurrence(indices, tokens, fields[3])
            out.setdefault(sid, []).append(occ)
    return out


def write_occurrences(path, items):
    """Write {sentence id: [MweOccurrence]} (or an id->occs item list)."""
    if isinstance(items, dict):
        items = items.items()
    with open(path, "w", encoding="utf-8") as handle:
        for sid, occs in items:
            for occ in occs:
                handle.write("%s\t%s\t%s\t%s\n"
                             % (sid, ",".join(str(i) for i in occ.indices),
                                occ.joined, occ.kind))
