"""Dependency scoring, model combination and the randomized significance
test.

Scoring is micro-averaged over pooled per-sentence counts.  An unlabeled
match requires both endpoints to agree as (index, word) pairs with
direction preserved; labeled matching additionally compares (cat_j, arg_k).
Precision with zero attempted dependencies is reported as 0 with a flag so
that batch runs survive parse failures.

The significance test is a one-tailed stratified randomized shuffling test:
each iteration swaps each sentence's (correct, attempted, gold) triple
between the two systems with probability one half and recomputes the
aggregate F1 difference; the p-value is (hits + 1) / (iterations + 1).
When 2^n does not exceed the iteration budget every swap pattern is
enumerated instead, so small inputs get the exact randomization p-value
under the same +1 convention.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .categories import arity, render
from .treebank import Dependency

INTERNAL = "internal"
MEDIATING = "mediating"
EXTERNAL = "external"

SCHEMES = ("medFromA", "rightmostMed", "leftmostMed")


def f_beta(precision, recall, beta=1.0):
    """The harmonic F measure (beta^2 + 1)PR / (beta^2 P + R)."""
    denom = beta * beta * precision + recall
    if denom == 0:
        return 0.0
    return (beta * beta + 1) * precision * recall / denom


def f1(precision, recall):
    return f_beta(precision, recall, 1.0)


@dataclass
class EvalReport:
    precision: float
    recall: float
    f1: float
    correct: int
    attempted: int
    gold: int
    undefined_precision: bool = False
    per_sentence: dict = field(default_factory=dict)


def _match_key(dep, labeled):
    key = (dep.i, dep.word_i, dep.j, dep.word_j)
    if labeled:
        key += (render(dep.cat_j), dep.arg_k)
    return key


def sentence_counts(system_deps, gold_deps, labeled=False):
    """(correct, attempted, gold) for one sentence, matching multisets of
    dependency keys."""
    system_keys = Counter(_match_key(d, labeled) for d in system_deps)
    gold_keys = Counter(_match_key(d, labeled) for d in gold_deps)
    correct = sum((system_keys & gold_keys).values())
    return correct, sum(system_keys.values()), sum(gold_keys.values())


def score(system, gold, labeled=False):
    """Score system dependencies against gold, both {sentence id: [Dependency]}.

    Raises ValueError listing the ids when the two sides cover different
    sentences.
    """
    if set(system) != set(gold):
        missing = sorted(set(gold) - set(system))
        extra = sorted(set(system) - set(gold))
        raise ValueError("sentence ids do not match: missing from system %s, "
                         "unknown to gold %s" % (missing, extra))
    per_sentence = {}
    for sid in sorted(system):
        per_sentence[sid] = sentence_counts(system[sid], gold[sid], labeled)
    correct = sum(c for c, _, _ in per_sentence.values())
    attempted = sum(a for _, a, _ in per_sentence.values())
    gold_total = sum(g for _, _, g in per_sentence.values())
    undefined = attempted == 0
    precision = correct / attempted if attempted else 0.0
    recall = correct / gold_total if gold_total else 0.0
    return EvalReport(precision, recall, f1(precision, recall),
                      correct, attempted, gold_total, undefined, per_sentence)


# ----------------------------------------------------------------------
# Edge taxonomy
# ----------------------------------------------------------------------

def membership_from_occurrences(occurrences):
    """Map leaf index -> MWE group key, for original-tokenization edges."""
    return {i: group for group, occ in enumerate(occurrences)
            for i in occ.indices}


def membership_from_tokens(tokens):
    """Map token index -> group key using the '+' markers of collapsed
    tokens; every marked token is its own MWE."""
    return {i: i for i, token in enumerate(tokens) if "+" in token}


def classify_edge(dep, membership):
    """internal when both endpoints sit in the same MWE, mediating when at
    least one endpoint is an MWE unit, external otherwise."""
    group_i = membership.get(dep.i)
    group_j = membership.get(dep.j)
    if group_i is not None and group_i == group_j:
        return INTERNAL
    if group_i is not None or group_j is not None:
        return MEDIATING
    return EXTERNAL


# ----------------------------------------------------------------------
# Model combination (decollapsing out_B with help from out_A)
# ----------------------------------------------------------------------

def _collapsed_positions(occurrences):
    """Collapsed index of each occurrence plus the shift bookkeeping needed
    to invert the collapsed tokenization."""
    occurrences = sorted(occurrences, key=lambda o: o.start)
    positions = {}
    shift = 0
    for occ in occurrences:
        positions[occ.indices[0] - shift] = occ
        shift += len(occ.indices) - 1
    return positions


def _to_original_index(collapsed_index, occurrences):
    if collapsed_index < 0:
        raise ValueError("negative collapsed index %d" % collapsed_index)
    shift = 0
    for occ in sorted(occurrences, key=lambda o: o.start):
        pos = occ.indices[0] - shift
        if collapsed_index > pos:
            shift += len(occ.indices) - 1
        elif collapsed_index == pos:
            raise ValueError("collapsed index %d is an MWE position"
                             % collapsed_index)
    return collapsed_index + shift


def combine_models(out_a, out_b, occurrences, scheme):
    """Combine baseline dependencies (original tokens) with collapsed-model
    dependencies (collapsed tokens) into original-tokenization output.

    External edges come from out_b, internal edges from out_a.  Mediating
    edges come from out_a under medFromA; under rightmostMed/leftmostMed
    they come from out_b with each MWE endpoint expanded to its rightmost
    or leftmost unit.  cat_j of an expanded functor endpoint is restored
    from out_a when that leaf heads some out_a dependency, else retained.
    """
    if scheme not in SCHEMES:
        raise ValueError("unknown combination scheme %r" % scheme)
    occurrences = sorted(occurrences, key=lambda o: o.start)
    membership_a = membership_from_occurrences(occurrences)
    positions = _collapsed_positions(occurrences)

    combined = []
    for dep in out_a:
        edge_class = classify_edge(dep, membership_a)
        if edge_class == INTERNAL:
            combined.append(dep)
        elif edge_class == MEDIATING and scheme == "medFromA":
            combined.append(dep)

    a_cats = {}
    for dep in out_a:
        a_cats.setdefault(dep.j, dep.cat_j)

    for dep in out_b:
        occ_i = positions.get(dep.i)
        occ_j = positions.get(dep.j)
        if occ_i is None and occ_j is None:
            combined.append(Dependency(
                _to_original_index(dep.i, occurrences),
                _to_original_index(dep.j, occurrences),
                dep.cat_j, dep.arg_k, dep.word_i, dep.word_j))
            continue
        if scheme == "medFromA":
            continue
        unit = -1 if scheme == "rightmostMed" else 0
        if occ_i is not None:
            i = occ_i.indices[unit]
            word_i = occ_i.tokens[unit]
        else:
            i = _to_original_index(dep.i, occurrences)
            word_i = dep.word_i
        if occ_j is not None:
            j = occ_j.indices[unit]
            word_j = occ_j.tokens[unit]
            cat_j = a_cats.get(j, dep.cat_j)
            if dep.arg_k > arity(cat_j):
                cat_j = dep.cat_j      # keep the slot inside the category
        else:
            j = _to_original_index(dep.j, occurrences)
            word_j = dep.word_j
            cat_j = dep.cat_j
        combined.append(Dependency(i, j, cat_j, dep.arg_k, word_i, word_j))
    combined.sort(key=lambda d: d.key())
    return combined


# ----------------------------------------------------------------------
# One-tailed randomized shuffling significance test
# ----------------------------------------------------------------------

@dataclass
class SigTestResult:
    p_value: float
    observed_diff: float
    iterations: int
    exhaustive: bool


def _pooled_f1(correct, attempted, gold):
    # F1 = 2PR/(P+R) collapses to 2c/(a+g) on pooled counts
    if attempted + gold == 0:
        return 0.0
    return 2.0 * correct / (attempted + gold)


def sig_test(counts_x, counts_y, iterations=10000, seed=0):
    """One-tailed stratified shuffling test of X against Y.

    counts_x/counts_y map sentence id -> (correct, attempted, gold).
    Returns the probability, under random per-sentence swaps, of an F1
    difference at least as large as the observed F1(X) - F1(Y).  Exact
    enumeration replaces sampling whenever 2^n <= iterations, making the
    result deterministic and seed-free on small inputs; otherwise the
    sampler is deterministic for a fixed seed.
    """
    if set(counts_x) != set(counts_y):
        raise ValueError("sentence ids do not match between systems")
    sids = sorted(counts_x)
    if not sids:
        raise ValueError("no sentences to test")
    x = np.array([counts_x[sid] for sid in sids], dtype=np.int64)
    y = np.array([counts_y[sid] for sid in sids], dtype=np.int64)
    observed = (_pooled_f1(*x.sum(axis=0).tolist())
                - _pooled_f1(*y.sum(axis=0).tolist()))
    n = len(sids)
    exhaustive = 2 ** n <= iterations
    if exhaustive:
        total = 2 ** n
        hits = 0
        for pattern in range(total):
            xs = x.copy()
            ys = y.copy()
            for bit in range(n):
                if pattern >> bit & 1:
                    xs[bit], ys[bit] = y[bit], x[bit]
            diff = (_pooled_f1(*xs.sum(axis=0).tolist())
                    - _pooled_f1(*ys.sum(axis=0).tolist()))
            if diff >= observed:
                hits += 1
        return SigTestResult((hits + 1) / (total + 1), observed, total, True)
    rng = np.random.default_rng(seed)
    swap = rng.random((iterations, n)) < 0.5
    delta = y - x                                 # swap adds delta to x side
    x_tot = x.sum(axis=0)[None, :] + swap.astype(np.int64) @ delta
    y_tot = y.sum(axis=0)[None, :] - swap.astype(np.int64) @ delta
    f1_x = np.zeros(iterations)
    f1_y = np.zeros(iterations)
    denom_x = x_tot[:, 1] + x_tot[:, 2]
    denom_y = y_tot[:, 1] + y_tot[:, 2]
    np.divide(2.0 * x_tot[:, 0], denom_x, out=f1_x, where=denom_x > 0)
    np.divide(2.0 * y_tot[:, 0], denom_y, out=f1_y, where=denom_y > 0)
    hits = int(np.count_nonzero(f1_x - f1_y >= observed))
    return SigTestResult((hits + 1) / (iterations + 1), observed,
                         iterations, False)
