"""Collapsing MWEs in derivation trees, dependency graphs and token
sequences.

Tree collapsing replaces an MWE's units with a single leaf only when the
units are siblings, i.e. some node dominates all and only the units; the
new leaf takes the dominating node's category and the '+'-joined lowercased
token.  Non-sibling MWEs are discarded.  Dependency collapsing then deletes
internal edges (both endpoints inside one collapsed MWE), redirects
mediating edges to the joined token (substituting the MWE's category when
the functor endpoint is swallowed) and re-indexes everything through the
collapsed tokenization.  A token-level variant treats every recognized MWE
as collapsible, which is how fully-collapsed test data is produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .treebank import (DerivationTree, Dependency, assign_leaf_indices,
                       leaf_nodes, lowest_dominating_node)


class OverlapError(ValueError):
    """Occurrences passed to a collapser must be pairwise index-disjoint."""


class DataInconsistencyError(ValueError):
    """A dependency references a leaf index unknown to the collapse."""


@dataclass
class CollapseOutcome:
    """Result of collapsing one tree.

    kept holds the occurrences that were spans-only constituents (now
    single leaves), discarded the rest.  index_map sends every original
    leaf index to its collapsed index; all units of a kept occurrence map
    to the same collapsed position.  categories records the category each
    kept occurrence inherited from its dominating node.
    """

    tree: DerivationTree
    kept: list = field(default_factory=list)
    discarded: list = field(default_factory=list)
    index_map: dict = field(default_factory=dict)
    categories: dict = field(default_factory=dict)


def _check_disjoint(occurrences):
    seen = set()
    for occ in occurrences:
        overlap = seen.intersection(occ.indices)
        if overlap:
            raise OverlapError("occurrences overlap at indices %s"
                               % sorted(overlap))
        seen.update(occ.indices)


def build_index_map(n_tokens, collapsed_occurrences):
    """Monotone map original index -> collapsed index when the given
    (disjoint) occurrences are each merged into their first unit's slot."""
    starts = {occ.indices[0] for occ in collapsed_occurrences}
    members = {i: occ for occ in collapsed_occurrences for i in occ.indices}
    index_map = {}
    new = 0
    for old in range(n_tokens):
        if old in starts:
            index_map[old] = new
            new += 1
        elif old in members:
            # non-first unit: share the first unit's collapsed position
            index_map[old] = index_map[members[old].indices[0]]
        else:
            index_map[old] = new
            new += 1
    return index_map


def collapse_tree(tree, occurrences):
    """Collapse sibling MWEs in a tree (algorithm 1).

    Each occurrence whose lowest dominating node spans exactly its unit
    indices is replaced by a single leaf labelled with that node's
    category; the rest are discarded.  The input tree is never mutated.
    """
    occurrences = sorted(occurrences, key=lambda o: o.start)
    _check_disjoint(occurrences)
    n_tokens = len(leaf_nodes(tree))
    for occ in occurrences:
        if occ.indices[-1] >= n_tokens:
            raise ValueError("occurrence %r outside tree with %d leaves"
                             % (occ.joined, n_tokens))
    kept = []
    discarded = []
    replacements = {}
    categories = {}
    for occ in occurrences:
        node, spans_only = lowest_dominating_node(tree, occ.indices)
        if spans_only:
            kept.append(occ)
            replacements[id(node)] = occ
            categories[occ] = node.category
        else:
            discarded.append(occ)

    def rebuild(node):
        occ = replacements.get(id(node))
        if occ is not None:
            return DerivationTree(node.category, (), occ.joined)
        if node.is_leaf():
            return DerivationTree(node.category, (), node.token)
        return DerivationTree(node.category,
                              tuple(rebuild(c) for c in node.children))

    collapsed = assign_leaf_indices(rebuild(tree))
    index_map = build_index_map(n_tokens, kept)
    return CollapseOutcome(collapsed, kept, discarded, index_map, categories)


def collapse_dependencies(deps, outcome):
    """Rewrite a dependency graph after tree collapsing (algorithm 2).

    Internal edges disappear; mediating edges get their MWE endpoint
    replaced by the joined token (and, on the functor side, the MWE's
    category); external edges pass through.  All indices are re-mapped to
    the collapsed tokenization.  Edge multiplicity is preserved, so
    len(result) == len(deps) - number of internal edges.
    """
    unit_occ = {i: occ for occ in outcome.kept for i in occ.indices}
    out = []
    for dep in deps:
        if dep.i not in outcome.index_map or dep.j not in outcome.index_map:
            raise DataInconsistencyError(
                "dependency %d->%d outside the collapsed sentence"
                % (dep.i, dep.j))
        occ_i = unit_occ.get(dep.i)
        occ_j = unit_occ.get(dep.j)
        if occ_i is not None and occ_i is occ_j:
            continue
        word_i = occ_i.joined if occ_i is not None else dep.word_i
        word_j = dep.word_j
        cat_j = dep.cat_j
        if occ_j is not None:
            word_j = occ_j.joined
            cat_j = outcome.categories.get(occ_j, cat_j)
        out.append(Dependency(outcome.index_map[dep.i],
                              outcome.index_map[dep.j],
                              cat_j, dep.arg_k, word_i, word_j))
    return out


def collapse_tokens(tokens, occurrences):
    """Collapse occurrences in a raw token sequence.

    Returns (collapsed tokens, index map).  Pass the kept occurrences of a
    tree collapse for gold-sibling test data, or every recognized
    occurrence for fully-collapsed test data.
    """
    occurrences = sorted(occurrences, key=lambda o: o.start)
    _check_disjoint(occurrences)
    for occ in occurrences:
        if occ.indices[-1] >= len(tokens):
            raise ValueError("occurrence %r outside sentence of %d tokens"
                             % (occ.joined, len(tokens)))
    index_map = build_index_map(len(tokens), occurrences)
    starts = {occ.indices[0]: occ for occ in occurrences}
    members = {i for occ in occurrences for i in occ.indices}
    out = []
    for i, token in enumerate(tokens):
        occ = starts.get(i)
        if occ is not None:
            out.append(occ.joined)
        elif i not in members:
            out.append(token)
    return out, index_map


def collapse_all_dependencies(deps, occurrences):
    """Dependency collapsing that treats every occurrence as collapsed,
    whether or not it was a tree constituent.

    No collapsed tree exists here, so cat_j of a swallowed functor is kept
    from the original dependency.
    """
    occurrences = sorted(occurrences, key=lambda o: o.start)
    _check_disjoint(occurrences)
    max_index = max((dep_index for dep in deps for dep_index in (dep.i, dep.j)),
                    default=-1)
    max_index = max(max_index,
                    max((occ.indices[-1] for occ in occurrences), default=-1))
    index_map = build_index_map(max_index + 1, occurrences)
    unit_occ = {i: occ for occ in occurrences for i in occ.indices}
    out = []
    for dep in deps:
        occ_i = unit_occ.get(dep.i)
        occ_j = unit_occ.get(dep.j)
        if occ_i is not None and occ_i is occ_j:
            continue
        word_i = occ_i.joined if occ_i is not None else dep.word_i
        word_j = occ_j.joined if occ_j is not None else dep.word_j
        out.append(Dependency(index_map[dep.i], index_map[dep.j],
                              dep.cat_j, dep.arg_k, word_i, word_j))
    return out


def detect_cycles(deps):
    """Number of unordered node pairs connected by edges in both directions."""
    edges = {(dep.i, dep.j) for dep in deps}
    return sum(1 for (a, b) in edges if a < b and (b, a) in edges)
