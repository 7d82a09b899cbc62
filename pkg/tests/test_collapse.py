import os
import random

import pytest

from ccgmwe.categories import parse_category, render
from ccgmwe.collapse import (CollapseOutcome, DataInconsistencyError,
                             OverlapError, build_index_map,
                             collapse_all_dependencies, collapse_dependencies,
                             collapse_tokens, collapse_tree, detect_cycles)
from ccgmwe.evaluation import (EXTERNAL, INTERNAL, MEDIATING, classify_edge,
                               membership_from_occurrences)
from ccgmwe.parser import extract_dependencies
from ccgmwe.recognition import MweOccurrence
from ccgmwe.treebank import (Dependency, leaves, read_dependencies,
                             read_treebank, render_tree)

PIB = MweOccurrence((0, 1, 2), ("Publishers", "Information", "Bureau"),
                    "proper-noun")
ACCORDING_TO = MweOccurrence((0, 1), ("according", "to"), "general")


def dep(i, j, cat, k, wi, wj):
    return Dependency(i, j, parse_category(cat), k, wi, wj)


class TestCollapseTree:
    def test_figure_subtree_collapses_to_single_leaf(self, fixtures_dir):
        tree = read_treebank(os.path.join(fixtures_dir,
                                          "fig_original_subtree.tb"))[0].tree
        outcome = collapse_tree(tree, [PIB])
        assert outcome.kept == [PIB]
        assert outcome.discarded == []
        assert render_tree(outcome.tree) == "(N publishers+information+bureau)"
        assert render(outcome.categories[PIB]) == "N"

    def test_non_siblings_are_discarded(self, fixtures_dir):
        tree = read_treebank(os.path.join(fixtures_dir,
                                          "fig_nonsibling_tree.tb"))[0].tree
        before = render_tree(tree)
        outcome = collapse_tree(tree, [ACCORDING_TO])
        assert outcome.kept == []
        assert outcome.discarded == [ACCORDING_TO]
        assert render_tree(outcome.tree) == before

    def test_empty_occurrences_is_identity(self, corpus):
        record = corpus[0]
        outcome = collapse_tree(record.tree, [])
        assert render_tree(outcome.tree) == render_tree(record.tree)
        assert outcome.kept == [] and outcome.discarded == []
        n = len(record.tokens)
        assert outcome.index_map == {i: i for i in range(n)}

    def test_overlap_rejected(self, fixtures_dir):
        tree = read_treebank(os.path.join(fixtures_dir,
                                          "fig_original_subtree.tb"))[0].tree
        other = MweOccurrence((1, 2), ("Information", "Bureau"), "proper-noun")
        with pytest.raises(OverlapError):
            collapse_tree(tree, [PIB, other])

    def test_occurrence_outside_tree_rejected(self, fixtures_dir):
        tree = read_treebank(os.path.join(fixtures_dir,
                                          "fig_original_subtree.tb"))[0].tree
        with pytest.raises(ValueError):
            collapse_tree(tree, [MweOccurrence((2, 3), ("Bureau", "x"), "general")])

    def test_index_map_is_monotone_and_merges_units(self, fixtures_dir):
        record = read_treebank(os.path.join(fixtures_dir,
                                            "fig_dep1_sentence.tb"))[0]
        mr_vinken = MweOccurrence((0, 1), ("Mr.", "Vinken"), "proper-noun")
        elsevier = MweOccurrence((5, 6), ("Elsevier", "N.V."), "proper-noun")
        outcome = collapse_tree(record.tree, [mr_vinken, elsevier])
        index_map = outcome.index_map
        values = [index_map[i] for i in range(len(record.tokens))]
        assert values == sorted(values)
        assert index_map[0] == index_map[1] == 0
        assert index_map[5] == index_map[6] == 4
        assert len(leaves(outcome.tree)) == len(record.tokens) - 2

    def test_leaf_count_arithmetic(self, corpus, lexicon):
        from ccgmwe.recognition import PRESETS, recognize
        for record in corpus:
            occs = recognize(lexicon, record.tokens, PRESETS["rec1"])
            outcome = collapse_tree(record.tree, occs)
            shrink = sum(len(o.indices) - 1 for o in outcome.kept)
            assert len(leaves(outcome.tree)) == len(record.tokens) - shrink
            assert sorted(outcome.kept + outcome.discarded,
                          key=lambda o: o.start) == sorted(
                occs, key=lambda o: o.start)

    def test_order_independence(self, fixtures_dir):
        record = read_treebank(os.path.join(fixtures_dir,
                                            "fig_dep1_sentence.tb"))[0]
        mr_vinken = MweOccurrence((0, 1), ("Mr.", "Vinken"), "proper-noun")
        elsevier = MweOccurrence((5, 6), ("Elsevier", "N.V."), "proper-noun")
        one = collapse_tree(record.tree, [mr_vinken, elsevier])
        two = collapse_tree(record.tree, [elsevier, mr_vinken])
        assert render_tree(one.tree) == render_tree(two.tree)
        assert one.index_map == two.index_map


class TestCollapseDependencies:
    def setup_method(self):
        # the four-token example: mr. vinken is chairman
        self.deps = [
            dep(1, 0, "N/N", 1, "vinken", "mr."),
            dep(1, 2, "(S\\NP)/NP", 1, "vinken", "is"),
            dep(3, 2, "(S\\NP)/NP", 2, "chairman", "is"),
        ]
        self.occ = MweOccurrence((0, 1), ("mr.", "vinken"), "proper-noun")
        self.outcome = CollapseOutcome(
            tree=None, kept=[self.occ],
            index_map=build_index_map(4, [self.occ]),
            categories={self.occ: parse_category("N")})

    def test_internal_deleted_mediating_redirected(self):
        out = collapse_dependencies(self.deps, self.outcome)
        assert len(out) == 2
        mediating, external = out
        assert (mediating.i, mediating.j) == (0, 1)
        assert mediating.word_i == "mr.+vinken"
        assert (external.i, external.j) == (2, 1)
        assert external.word_i == "chairman"

    def test_functor_side_substitutes_category(self):
        deps = [dep(2, 1, "N/N", 1, "x", "vinken")]
        out = collapse_dependencies(deps, self.outcome)
        assert out[0].word_j == "mr.+vinken"
        assert render(out[0].cat_j) == "N"
        assert (out[0].i, out[0].j) == (1, 0)

    def test_empty_kept_reindexes_identically(self):
        outcome = CollapseOutcome(tree=None, kept=[],
                                  index_map={i: i for i in range(4)})
        assert collapse_dependencies(self.deps, outcome) == self.deps

    def test_out_of_range_index_raises(self):
        with pytest.raises(DataInconsistencyError):
            collapse_dependencies([dep(9, 2, "N/N", 1, "x", "y")], self.outcome)

    def test_figure_dep1_to_dep2(self, fixtures_dir):
        record = read_treebank(os.path.join(fixtures_dir,
                                            "fig_dep1_sentence.tb"))[0]
        gold = dict(read_dependencies(
            os.path.join(fixtures_dir, "fig_dep1.deps")))["dep1"]
        expected = dict(read_dependencies(
            os.path.join(fixtures_dir, "fig_dep2.deps")))["dep1"]
        occs = [MweOccurrence((0, 1), ("Mr.", "Vinken"), "proper-noun"),
                MweOccurrence((5, 6), ("Elsevier", "N.V."), "proper-noun")]
        outcome = collapse_tree(record.tree, occs)
        out = collapse_dependencies(gold, outcome)
        assert sorted(d.key() for d in out) == sorted(d.key() for d in expected)


class TestCollapseTokens:
    def test_four_token_example(self):
        occ = MweOccurrence((0, 1), ("Mr.", "Vinken"), "proper-noun")
        tokens, index_map = collapse_tokens(["Mr.", "Vinken", "is", "chairman"],
                                            [occ])
        assert tokens == ["mr.+vinken", "is", "chairman"]
        assert index_map == {0: 0, 1: 0, 2: 1, 3: 2}

    def test_identity_without_occurrences(self):
        tokens, index_map = collapse_tokens(["a", "b"], [])
        assert tokens == ["a", "b"]
        assert index_map == {0: 0, 1: 1}

    def test_worked_example_shrinks_by_five(self, lexicon, worked_example_tokens):
        from ccgmwe.recognition import PRESETS, recognize
        occs = recognize(lexicon, worked_example_tokens, PRESETS["rec1"])
        tokens, _ = collapse_tokens(worked_example_tokens, occs)
        assert len(tokens) == len(worked_example_tokens) - 5
        assert "publishers+information+bureau" in tokens

    def test_overlap_rejected(self):
        a = MweOccurrence((0, 1), ("a", "b"), "general")
        b = MweOccurrence((1, 2), ("b", "c"), "general")
        with pytest.raises(OverlapError):
            collapse_tokens(["a", "b", "c"], [a, b])


class TestCollapseAllDependencies:
    def test_matches_tree_route_modulo_category(self, fixtures_dir):
        record = read_treebank(os.path.join(fixtures_dir,
                                            "fig_dep1_sentence.tb"))[0]
        gold = extract_dependencies(record.tree)
        occs = [MweOccurrence((0, 1), ("Mr.", "Vinken"), "proper-noun"),
                MweOccurrence((5, 6), ("Elsevier", "N.V."), "proper-noun")]
        outcome = collapse_tree(record.tree, occs)
        with_tree = collapse_dependencies(gold, outcome)
        without_tree = collapse_all_dependencies(gold, occs)
        strip = lambda ds: sorted((d.i, d.j, d.arg_k, d.word_i, d.word_j)
                                  for d in ds)
        assert strip(with_tree) == strip(without_tree)

    def test_all_internal_yields_empty(self):
        occ = MweOccurrence((0, 1), ("a", "b"), "general")
        deps = [dep(0, 1, "N/N", 1, "a", "b")]
        assert collapse_all_dependencies(deps, [occ]) == []

    def test_no_occurrences_is_identity(self):
        deps = [dep(0, 1, "N/N", 1, "a", "b")]
        assert collapse_all_dependencies(deps, []) == deps

    def test_category_retained_for_swallowed_functor(self):
        occ = MweOccurrence((1, 2), ("according", "to"), "general")
        deps = [dep(3, 2, "PP/NP", 1, "bureau", "to")]
        out = collapse_all_dependencies(deps, [occ])
        assert out[0].word_j == "according+to"
        assert render(out[0].cat_j) == "PP/NP"


class TestCycles:
    def test_two_opposite_edges(self):
        deps = [dep(0, 1, "N/N", 1, "a", "b"), dep(1, 0, "N/N", 1, "b", "a")]
        assert detect_cycles(deps) == 1

    def test_figure_dep2_is_acyclic(self, fixtures_dir):
        deps = dict(read_dependencies(
            os.path.join(fixtures_dir, "fig_dep2.deps")))["dep1"]
        assert detect_cycles(deps) == 0

    def test_empty(self):
        assert detect_cycles([]) == 0


def random_graph(rng):
    """A random dependency list plus a random disjoint MWE overlay."""
    n = rng.randint(4, 14)
    tokens = ["w%d" % i for i in range(n)]
    pairs = set()
    deps = []
    for _ in range(rng.randint(0, 2 * n)):
        i, j = rng.sample(range(n), 2)
        if (i, j) in pairs:
            continue
        pairs.add((i, j))
        deps.append(dep(i, j, "N/N", 1, tokens[i], tokens[j]))
    occurrences = []
    position = 0
    while position < n - 1:
        if rng.random() < 0.35:
            length = rng.randint(2, min(3, n - position))
            occurrences.append(MweOccurrence(
                tuple(range(position, position + length)),
                tuple(tokens[position:position + length]), "general"))
            position += length
        else:
            position += 1
    return deps, occurrences


class TestRandomGraphConservation:
    def test_edge_conservation_and_partition(self):
        rng = random.Random(1234)
        for _ in range(1000):
            deps, occurrences = random_graph(rng)
            membership = membership_from_occurrences(occurrences)
            classes = [classify_edge(d, membership) for d in deps]
            internal = classes.count(INTERNAL)
            assert internal + classes.count(MEDIATING) + \
                classes.count(EXTERNAL) == len(deps)
            out = collapse_all_dependencies(deps, occurrences)
            assert len(out) == len(deps) - internal
