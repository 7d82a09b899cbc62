"""A small generative CCG chart parser conditioned on lexical categories.

The model decomposes the joint probability of a derivation and its sentence
into one expansion probability per node plus one emission per leaf:

    P(T, S) = prod_nodes P(expansion | category) * prod_leaves emission

where a leaf's expansion is the distinguished LEX outcome and its emission
is P(token | category) for tokens seen at least `rare_threshold` times in
training.  Rare and unseen tokens instead emit through a POS back-off,
P(category | tag), with tags supplied by a unigram frequency tagger trained
on the same data.  Decoding is Viterbi CKY over the trained expansion
inventory; candidate binary expansions are the treebank-observed ones,
which subsume the apply/compose-derivable pairs and also cover
non-combinatory absorption nodes seen in training.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .categories import (FORWARD_APPLY, FORWARD_COMPOSE, arity,
                         derivation_rule, is_modifier, parse_category, render,
                         target)
from .treebank import (DerivationTree, Dependency, assign_leaf_indices,
                       leaf_nodes, leaves)

# Leaf expansion marker: a category "expands" to LEX when it emits a token.
LEX = ()

# Atoms treated as punctuation for absorption nodes and head passing.
PUNCT_ATOMS = {"PUNC", ",", ".", ";", ":", "conj", "LRB", "RRB"}

_DETERMINER = parse_category("NP/N")

_ATOM_POS = {"S": "V", "N": "N", "NP": "N", "PP": "P", "PUNC": "PUNC",
             "conj": "PUNC"}


def pos_for_category(cat):
    """Coarse POS tag (N, V, P, D, ADV, PUNC) for a lexical category.

    The synthetic data carries no explicit tags, so the tagger's training
    pairs are derived from the lexical categories themselves with this
    fixed mapping: X|X modifiers of verbal projections are ADV, NP/N is D,
    functors whose result is itself a modifier are prepositions, and
    everything else follows its target atom.
    """
    if cat.is_atom():
        return _ATOM_POS.get(cat.atom, "N")
    if is_modifier(cat):
        return "ADV" if target(cat).atom == "S" else "N"
    if cat == _DETERMINER:
        return "D"
    if cat.result.is_functor() and is_modifier(cat.result):
        return "P"
    return _ATOM_POS.get(target(cat).atom, "N")


@dataclass
class ParserModel:
    """Tables of the generative model; immutable once trained."""

    rules: dict                 # Category -> {expansion tuple or LEX: prob}
    lexical: dict               # Category -> {token: prob}
    pos_backoff: dict           # tag -> {Category: prob}
    token_pos: dict             # token -> {tag: count}
    token_freq: dict            # token -> count
    roots: dict                 # Category -> prob over training roots
    smoothing: float = 0.0
    rare_threshold: int = 2
    _indexes: dict | None = field(default=None, repr=False, compare=False)

    def ensure_indexes(self):
        if self._indexes is None:
            self._indexes = _build_indexes(self)
        return self._indexes


@dataclass
class ParseResult:
    """Best derivation for a token sequence, or a failure marker.

    tree/logprob are None when no sentence-rooted derivation covers the
    input; stats carries chart counters.
    """

    tree: DerivationTree | None
    logprob: float | None
    stats: dict


def _smoothed(counter, smoothing):
    total = sum(counter.values())
    denom = total + smoothing * len(counter)
    return {outcome: (count + smoothing) / denom
            for outcome, count in counter.items()}


def train(records, smoothing=0.0):
    """Estimate a ParserModel from derivation trees.

    Relative frequencies with add-`smoothing` over each condition's
    observed outcome inventory, so every conditional distribution sums to
    one.  The POS back-off collects (tag of token, lexical category) pairs
    over all training leaves.
    """
    records = list(records)
    if not records:
        raise ValueError("cannot train on an empty treebank")
    rule_counts = defaultdict(Counter)
    lex_counts = defaultdict(Counter)
    backoff_counts = defaultdict(Counter)
    token_pos = defaultdict(Counter)
    token_freq = Counter()
    root_counts = Counter()
    for record in records:
        if record.tree is None:
            raise ValueError("sentence %s has no tree" % record.sid)
        root_counts[record.tree.category] += 1
        stack = [record.tree]
        while stack:
            node = stack.pop()
            if node.is_leaf():
                cat = node.category
                rule_counts[cat][LEX] += 1
                lex_counts[cat][node.token] += 1
                tag = pos_for_category(cat)
                backoff_counts[tag][cat] += 1
                token_pos[node.token][tag] += 1
                token_freq[node.token] += 1
            else:
                rule_counts[node.category][
                    tuple(child.category for child in node.children)] += 1
                stack.extend(node.children)
    return ParserModel(
        rules={c: _smoothed(v, smoothing) for c, v in rule_counts.items()},
        lexical={c: _smoothed(v, smoothing) for c, v in lex_counts.items()},
        pos_backoff={t: _smoothed(v, smoothing) for t, v in backoff_counts.items()},
        token_pos={t: dict(v) for t, v in token_pos.items()},
        token_freq=dict(token_freq),
        roots=_smoothed(root_counts, 0.0),
        smoothing=smoothing,
    )


def _best_tag(dist):
    return sorted(dist.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]


def pos_tag(model, tokens):
    """Unigram tagging: the most frequent training tag of each token, the
    tag of its lowercased form for unseen tokens, and the globally most
    frequent tag as a last resort.  Ties pick the smallest tag."""
    global_counts = Counter()
    for dist in model.token_pos.values():
        global_counts.update(dist)
    default = _best_tag(global_counts) if global_counts else "N"
    tags = []
    for token in tokens:
        dist = model.token_pos.get(token)
        if dist is None:
            dist = model.token_pos.get(token.lower())
        tags.append(_best_tag(dist) if dist else default)
    return tags


def _build_indexes(model):
    binary = defaultdict(list)
    unary = defaultdict(list)
    for parent in sorted(model.rules, key=render):
        for expansion, prob in sorted(model.rules[parent].items(),
                                      key=lambda kv: tuple(map(render, kv[0]))):
            if expansion is LEX or len(expansion) == 0:
                continue
            logp = math.log(prob)
            if len(expansion) == 1:
                unary[expansion[0]].append((parent, logp))
            else:
                binary[expansion].append((parent, logp))
    lex_index = defaultdict(list)
    for cat in sorted(model.lexical, key=render):
        lex_logp = _log_lex_expansion(model, cat)
        if lex_logp is None:
            continue
        for token, prob in model.lexical[cat].items():
            lex_index[token].append((cat, lex_logp + math.log(prob)))
    backoff_index = defaultdict(list)
    for tag in sorted(model.pos_backoff):
        for cat, prob in sorted(model.pos_backoff[tag].items(),
                                key=lambda kv: render(kv[0])):
            lex_logp = _log_lex_expansion(model, cat)
            if lex_logp is None:
                continue
            backoff_index[tag].append((cat, lex_logp + math.log(prob)))
    return {
        "binary": dict(binary),
        "unary": dict(unary),
        "lex": dict(lex_index),
        "backoff": dict(backoff_index),
        "roots": sorted(model.roots, key=render),
    }


def _log_lex_expansion(model, cat):
    prob = model.rules.get(cat, {}).get(LEX)
    return math.log(prob) if prob else None


def _leaf_candidates(model, indexes, token, tag):
    if model.token_freq.get(token, 0) >= model.rare_threshold:
        return indexes["lex"].get(token, ())
    return indexes["backoff"].get(tag, ())


def _unary_closure(unary_index, cell):
    agenda = list(cell)
    while agenda:
        child = agenda.pop(0)
        base = cell[child][0]
        for parent, logq in unary_index.get(child, ()):
            cand = base + logq
            entry = cell.get(parent)
            if entry is None or cand > entry[0]:
                cell[parent] = (cand, ("U", child))
                agenda.append(parent)


def parse(model, tokens):
    """Viterbi CKY decoding; returns the best sentence-rooted derivation.

    Failure to cover the input with a training-root category is a normal
    outcome reported through the result, not an error.
    """
    if not tokens:
        raise ValueError("cannot parse an empty token sequence")
    indexes = model.ensure_indexes()
    binary_index = indexes["binary"]
    unary_index = indexes["unary"]
    tags = pos_tag(model, tokens)
    n = len(tokens)
    chart = {}
    entries = 0
    for i, token in enumerate(tokens):
        cell = {}
        for cat, logp in _leaf_candidates(model, indexes, token, tags[i]):
            entry = cell.get(cat)
            if entry is None or logp > entry[0]:
                cell[cat] = (logp, None)
        _unary_closure(unary_index, cell)
        chart[i, i + 1] = cell
        entries += len(cell)
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            cell = {}
            for k in range(i + 1, j):
                left_cell = chart[i, k]
                right_cell = chart[k, j]
                if not left_cell or not right_cell:
                    continue
                for lcat, (lp, _) in left_cell.items():
                    for rcat, (rp, _) in right_cell.items():
                        for parent, logq in binary_index.get((lcat, rcat), ()):
                            cand = lp + rp + logq
                            entry = cell.get(parent)
                            if entry is None or cand > entry[0]:
                                cell[parent] = (cand, (k, lcat, rcat))
            _unary_closure(unary_index, cell)
            chart[i, j] = cell
            entries += len(cell)
    stats = {"tokens": n, "chart_entries": entries}
    best_cat, best_logp = None, None
    top = chart[0, n]
    for cat in indexes["roots"]:
        entry = top.get(cat)
        if entry is not None and (best_logp is None or entry[0] > best_logp):
            best_cat, best_logp = cat, entry[0]
    if best_cat is None:
        return ParseResult(None, None, stats)
    tree = _build_tree(chart, tokens, 0, n, best_cat)
    return ParseResult(assign_leaf_indices(tree), best_logp, stats)


def _build_tree(chart, tokens, i, j, cat):
    backpointer = chart[i, j][cat][1]
    if backpointer is None:
        return DerivationTree(cat, (), tokens[i])
    if backpointer[0] == "U":
        return DerivationTree(cat, (_build_tree(chart, tokens, i, j,
                                                backpointer[1]),))
    k, lcat, rcat = backpointer
    return DerivationTree(cat, (_build_tree(chart, tokens, i, k, lcat),
                                _build_tree(chart, tokens, k, j, rcat)))


def score_tree(model, tree):
    """Recompute log P(T, S) of a derivation under the model, mirroring the
    parser's emission rules exactly; None when any factor is unseen."""
    tokens = [token for _, token in leaves(tree)]
    tags = pos_tag(model, tokens)
    logp = 0.0
    stack = [tree]
    while stack:
        node = stack.pop()
        stack.extend(node.children)
        dist = model.rules.get(node.category)
        if dist is None:
            return None
        if node.is_leaf():
            prob = dist.get(LEX)
        else:
            prob = dist.get(tuple(c.category for c in node.children))
        if not prob:
            return None
        logp += math.log(prob)
    for index, node in enumerate(leaf_nodes(tree)):
        token = node.token
        if model.token_freq.get(token, 0) >= model.rare_threshold:
            prob = model.lexical.get(node.category, {}).get(token)
        else:
            prob = model.pos_backoff.get(tags[index], {}).get(node.category)
        if not prob:
            return None
        logp += math.log(prob)
    return logp


# ----------------------------------------------------------------------
# Dependency extraction
# ----------------------------------------------------------------------

def extract_dependencies(tree, stats=None):
    """Extract the 6-tuple dependencies encoded by a derivation.

    Every application or composition node emits an edge from the heads of
    its argument subtree to the heads of its functor subtree; arg_k is the
    functor-side category's remaining arity at that node and cat_j the
    functor head leaf's lexical category.  Headship passes to the argument
    under X|X modifiers and the NP/N determiner; punctuation absorption
    nodes and same-category (coordination or apposition) nodes emit no
    edge, the latter exposing the union of their children's heads.  Nodes
    that fit no rule are skipped; when `stats` is a dict the count of
    skipped nodes is accumulated under "skipped_nodes".
    """
    deps = []
    skipped = 0

    def walk(node):
        nonlocal skipped
        if node.is_leaf():
            return (node,)
        if len(node.children) == 1:
            return walk(node.children[0])
        left, right = node.children
        left_heads = walk(left)
        right_heads = walk(right)
        rule = derivation_rule(left.category, right.category, node.category)
        if rule is None:
            lcat, rcat = left.category, right.category
            if node.category == rcat and lcat.is_atom() and lcat.atom in PUNCT_ATOMS:
                return right_heads
            if node.category == lcat and rcat.is_atom() and rcat.atom in PUNCT_ATOMS:
                return left_heads
            merged = tuple(sorted(left_heads + right_heads,
                                  key=lambda leaf: leaf.leaf_index))
            if node.category == lcat and node.category == rcat:
                return merged
            skipped += 1
            return merged
        if rule in (FORWARD_APPLY, FORWARD_COMPOSE):
            functor_node, functor_heads, arg_heads = left, left_heads, right_heads
        else:
            functor_node, functor_heads, arg_heads = right, right_heads, left_heads
        slot = arity(functor_node.category)
        for functor_head in functor_heads:
            if not 1 <= slot <= arity(functor_head.category):
                skipped += 1
                continue
            for arg_head in arg_heads:
                deps.append(Dependency(arg_head.leaf_index,
                                       functor_head.leaf_index,
                                       functor_head.category, slot,
                                       arg_head.token, functor_head.token))
        functor_cat = functor_node.category
        if is_modifier(functor_cat) or functor_cat == _DETERMINER:
            return arg_heads
        return functor_heads

    walk(tree)
    if stats is not None:
        stats["skipped_nodes"] = stats.get("skipped_nodes", 0) + skipped
    return deps


# ----------------------------------------------------------------------
# Model persistence: TSV of (table, condition, outcome, value) rows
# ----------------------------------------------------------------------

def _render_expansion(expansion):
    if expansion is LEX or len(expansion) == 0:
        return "<LEX>"
    return " ".join(render(cat) for cat in expansion)


def _parse_expansion(text):
    if text == "<LEX>":
        return LEX
    return tuple(parse_category(part) for part in text.split(" "))


def save_model(path, model):
    rows = []
    rows.append(("meta", "smoothing", "", repr(model.smoothing)))
    rows.append(("meta", "rare_threshold", "", repr(model.rare_threshold)))
    for cat in sorted(model.rules, key=render):
        for expansion, prob in sorted(model.rules[cat].items(),
                                      key=lambda kv: _render_expansion(kv[0])):
            rows.append(("rule", render(cat), _render_expansion(expansion),
                         repr(prob)))
    for cat in sorted(model.lexical, key=render):
        for token, prob in sorted(model.lexical[cat].items()):
            rows.append(("lex", render(cat), token, repr(prob)))
    for tag in sorted(model.pos_backoff):
        for cat, prob in sorted(model.pos_backoff[tag].items(),
                                key=lambda kv: render(kv[0])):
            rows.append(("backoff", tag, render(cat), repr(prob)))
    for token in sorted(model.token_pos):
        for tag, count in sorted(model.token_pos[token].items()):
            rows.append(("tokpos", token, tag, repr(count)))
    for cat in sorted(model.roots, key=render):
        rows.append(("root", "", render(cat), repr(model.roots[cat])))
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write("\t".join(row) + "\n")


def load_model(path):
    rules = defaultdict(dict)
    lexical = defaultdict(dict)
    backoff = defaultdict(dict)
    token_pos = defaultdict(dict)
    roots = {}
    meta = {"smoothing": 0.0, "rare_threshold": 2}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ValueError("line %d: expected 4 fields" % lineno)
            table, condition, outcome, value = fields
            if table == "meta":
                meta[condition] = float(value) if condition == "smoothing" \
                    else int(float(value))
            elif table == "rule":
                rules[parse_category(condition)][_parse_expansion(outcome)] = \
                    float(value)
            elif table == "lex":
                lexical[parse_category(condition)][outcome] = float(value)
            elif table == "backoff":
                backoff[condition][parse_category(outcome)] = float(value)
            elif table == "tokpos":
                token_pos[condition][outcome] = int(float(value))
            elif table == "root":
                roots[parse_category(outcome)] = float(value)
            else:
                raise ValueError("line %d: unknown table %r" % (lineno, table))
    token_freq = {token: sum(dist.values()) for token, dist in token_pos.items()}
    return ParserModel(dict(rules), dict(lexical), dict(backoff),
                       dict(token_pos), token_freq, roots,
                       smoothing=meta["smoothing"],
                       rare_threshold=meta["rare_threshold"])
