#!/usr/bin/env python3
"""Build the synthetic mini-treebank shipped under data/.

The corpus is a fixed list of hand-templated sentences over a small
vocabulary: noun phrases with determiners and stacked modifiers, a copula,
transitive and intransitive verbs, verb-attaching and noun-attaching
prepositions, auxiliaries (one composition derivation included), comma
apposition and sentence-final punctuation via flagged absorption nodes.
Several sentences carry MWEs from data/lexicon.tsv, some as siblings, some
deliberately not (the according-to pattern and one noun compound inside a
larger stack).

Run from the repository root:  python tools/build_corpus.py
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from ccgmwe.categories import parse_category, derivation_rule, render
from ccgmwe.treebank import (DerivationTree, SentenceRecord, leaves,
                             write_treebank)

C = parse_category

S = C("S")
NP = C("NP")
N = C("N")
PP = C("PP")
PUNC = C("PUNC")
NMOD = C("N/N")
DET = C("NP/N")
IV = C("S\\NP")
TV = C("(S\\NP)/NP")
TVPP = C("((S\\NP)/NP)/PP")
OF = C("(NP\\NP)/NP")
TO = C("PP/NP")
VPREP = C("((S\\NP)\\(S\\NP))/NP")
ACCORDING = C("((S\\NP)\\(S\\NP))/PP")
ADV = C("(S\\NP)\\(S\\NP)")
ADVMOD = C("((S\\NP)\\(S\\NP))/((S\\NP)\\(S\\NP))")
NADV = C("((S\\NP)\\(S\\NP))/N")
AUX = C("(S\\NP)/(S\\NP)")
SS = C("S/S")
SSMOD = C("(S/S)/(S/S)")


def lf(cat, token):
    return DerivationTree(cat, (), token)


def nd(cat, *children):
    return DerivationTree(cat, tuple(children))


def nstack(*words):
    """Right-branching N/N* N stack: nstack("Dutch", "publishing", "group")."""
    tree = lf(N, words[-1])
    for word in reversed(words[:-1]):
        tree = nd(N, lf(NMOD, word), tree)
    return tree


def np_bare(*words):
    return nd(NP, nstack(*words))


def np_det(det, *words):
    return nd(NP, lf(DET, det), nstack(*words))


def np_of(head_np, obj_np):
    return nd(NP, head_np, nd(C("NP\\NP"), lf(OF, "of"), obj_np))


def np_appos(np1, np2):
    """Comma apposition: a flagged NP over [NP, [NP , NP]]."""
    return nd(NP, np1, nd(NP, lf(PUNC, ","), np2))


def vp_t(verb, obj):
    return nd(IV, lf(TV, verb), obj)


def vp_shore(obj):
    return nd(IV, nd(TV, lf(TVPP, "shore"), lf(PP, "up")), obj)


def vp_aux(aux, vp):
    return nd(IV, lf(AUX, aux), vp)


def vp_aux_fc(aux, verb, obj):
    """Auxiliary composed with the verb before taking the object."""
    return nd(IV, nd(TV, lf(AUX, aux), lf(TV, verb)), obj)


def vp_adv(vp, adv):
    return nd(IV, vp, lf(ADV, adv))


def vp_at_least(vp):
    return nd(IV, vp, nd(ADV, lf(ADVMOD, "at"), lf(ADV, "least")))


def vp_last_year(vp):
    return nd(IV, vp, nd(ADV, lf(NADV, "last"), lf(N, "year")))


def vp_prep(vp, prep, obj):
    return nd(IV, vp, nd(ADV, lf(VPREP, prep), obj))


def vp_according(vp, obj):
    return nd(IV, vp, nd(ADV, lf(ACCORDING, "according"),
                         nd(PP, lf(TO, "to"), obj)))


def sent(subj, vp):
    return nd(S, subj, vp)


def of_course(sentence):
    return nd(S, nd(SS, lf(SSMOD, "Of"), lf(SS, "course")), sentence)


def full_stop(sentence):
    return nd(S, sentence, lf(PUNC, "."))


MR_VINKEN = np_bare("Mr.", "Vinken")
MR_SPOON = np_bare("Mr.", "Spoon")
ELSEVIER = np_bare("Elsevier", "N.V.")
PIB = np_bare("Publishers", "Information", "Bureau")


def build_sentences():
    out = []

    def add(tree):
        out.append(full_stop(tree))

    # 1-40: training
    add(sent(MR_VINKEN, vp_t("is", np_of(np_bare("chairman"),
        np_appos(ELSEVIER, np_det("the", "Dutch", "publishing", "group"))))))
    add(sent(np_det("The", "executive"), vp_t("buys", np_det("the", "shares"))))
    add(sent(PIB, vp_t("reported", np_det("a", "decline"))))
    add(sent(np_det("The", "stock", "market"),
             vp_adv(vp_adv(lf(IV, "fell"), "sharply"), "yesterday")))
    add(sent(MR_SPOON, vp_t("sells", np_det("the", "group"))))
    add(sent(np_det("The", "group"),
             vp_aux("will", vp_shore(np_det("the", "price")))))
    add(sent(np_det("The", "index"), vp_according(lf(IV, "fell"), PIB)))
    add(of_course(sent(np_det("the", "index"), lf(IV, "fell"))))
    add(sent(np_det("The", "price"),
             vp_adv(vp_adv(lf(IV, "fell"), "slightly"), "yesterday")))
    add(sent(np_det("The", "chairman"),
             vp_t("posted", np_det("a", "big", "profit"))))
    add(sent(np_det("A", "spokesman"), vp_t("reported", np_det("the", "plan"))))
    add(sent(np_det("The", "Dutch", "group"), vp_adv(lf(IV, "gained"), "slightly")))
    add(sent(np_det("The", "new", "executive"),
             vp_aux_fc("will", "buy", np_det("a", "report"))))
    add(sent(MR_VINKEN, vp_t("sells", np_det("the", "shares"))))
    add(sent(np_det("The", "ad", "pages"), lf(IV, "fell")))
    add(sent(np_det("The", "index"), vp_last_year(lf(IV, "rose"))))
    add(sent(ELSEVIER, vp_t("posted", np_det("the", "profit"))))
    add(sent(np_det("The", "spokesman"),
             vp_t("is", np_det("the", "new", "chairman"))))
    add(sent(np_det("The", "stock", "market"), vp_adv(lf(IV, "gained"), "sharply")))
    add(sent(MR_SPOON, vp_t("is", np_of(np_bare("spokesman"),
        np_appos(np_det("the", "bureau"), np_det("a", "big", "group"))))))
    add(sent(np_det("The", "first", "report"),
             vp_prep(lf(IV, "fell"), "during", np_det("the", "year"))))
    add(sent(PIB, vp_t("sells", np_bare("ad", "pages"))))
    add(sent(np_det("The", "plan"),
             vp_aux("will", vp_shore(np_det("the", "market")))))
    add(sent(MR_VINKEN,
             vp_adv(vp_t("reported", np_det("a", "big", "decline")), "yesterday")))
    add(sent(np_det("The", "price"),
             vp_according(lf(IV, "rose"), np_det("the", "spokesman"))))
    add(of_course(sent(np_det("the", "group"), lf(IV, "gained"))))
    add(sent(np_det("A", "new", "index"), vp_adv(lf(IV, "fell"), "sharply")))
    add(sent(np_det("The", "executive"),
             vp_t("is", np_of(np_bare("chairman"), np_det("the", "group")))))
    add(sent(np_det("The", "shares"),
             vp_adv(vp_adv(lf(IV, "rose"), "slightly"), "yesterday")))
    add(sent(MR_SPOON, vp_t("buys", np_det("the", "first", "shares"))))
    add(sent(np_det("The", "publishing", "group"),
             vp_last_year(vp_t("posted", np_det("a", "profit")))))
    add(sent(ELSEVIER, vp_t("is", np_det("the", "Dutch", "group"))))
    add(sent(np_det("The", "bureau"),
             vp_t("reported", np_det("a", "stock", "market", "decline"))))
    add(sent(np_det("The", "big", "group"),
             vp_aux("will", vp_t("sell", np_det("the", "shares")))))
    add(sent(np_det("The", "spokesman"), vp_t("buy", np_det("a", "report"))))
    add(sent(np_det("The", "index"),
             vp_prep(lf(IV, "fell"), "in", np_det("the", "first", "year"))))
    add(sent(MR_VINKEN, vp_aux("will", vp_t("buy", np_det("the", "group")))))
    add(sent(np_det("The", "spokesman"), vp_adv(lf(IV, "rose"), "sharply")))
    add(sent(np_det("The", "ad", "pages"), vp_last_year(lf(IV, "fell"))))
    add(sent(np_det("The", "big", "bureau"), vp_t("sells", np_det("the", "report"))))

    # 41-45: development
    add(sent(np_det("The", "executive"),
             vp_adv(vp_t("reported", np_det("the", "plan")), "yesterday")))
    add(sent(MR_SPOON, vp_t("posted", np_det("a", "profit"))))
    add(sent(np_det("The", "Dutch", "bureau"), vp_t("buys", np_det("the", "shares"))))
    add(of_course(sent(np_det("the", "price"), lf(IV, "fell"))))
    add(sent(np_det("The", "group"),
             vp_according(lf(IV, "fell"), np_det("the", "bureau"))))

    # 46-60: test
    add(sent(MR_SPOON, vp_t("is", np_of(np_bare("chairman"),
        np_appos(ELSEVIER, np_det("the", "big", "publishing", "group"))))))
    add(sent(PIB, vp_t("posted", np_det("a", "big", "profit"))))
    add(sent(np_det("The", "stock", "market"),
             vp_adv(vp_adv(lf(IV, "fell"), "slightly"), "yesterday")))
    add(sent(np_det("The", "executive"),
             vp_aux("will", vp_shore(np_det("the", "price")))))
    add(sent(np_det("The", "index"), vp_according(lf(IV, "rose"), PIB)))
    add(sent(MR_VINKEN, vp_t("buys", np_det("the", "first", "shares"))))
    add(sent(np_det("The", "ad", "pages"), vp_last_year(lf(IV, "rose"))))
    add(of_course(sent(np_det("the", "stock", "market"), lf(IV, "gained"))))
    add(sent(np_det("The", "new", "spokesman"), vp_t("is", np_det("the", "chairman"))))
    add(sent(ELSEVIER,
             vp_prep(vp_t("reported", np_det("a", "decline")), "in",
                     np_det("the", "shares"))))
    add(sent(np_det("The", "publishing", "group"),
             vp_aux_fc("will", "buy", np_bare("ad", "pages"))))
    add(sent(MR_SPOON, vp_adv(vp_t("reported", np_det("the", "plan")), "yesterday")))
    add(sent(np_det("The", "price"), vp_adv(vp_at_least(lf(IV, "fell")), "slightly")))
    add(sent(np_det("The", "big", "group"), vp_t("is", np_det("the", "new", "bureau"))))
    add(sent(np_det("The", "first", "index"),
             vp_last_year(vp_adv(lf(IV, "gained"), "sharply"))))

    return out


def verify(records):
    """Check the structural invariants the toolkit assumes."""
    flagged = 0
    for record in records:
        stack = [record.tree]
        while stack:
            node = stack.pop()
            stack.extend(node.children)
            if len(node.children) != 2:
                continue
            left, right = node.children
            if derivation_rule(left.category, right.category, node.category):
                continue
            flagged += 1
            lcat, rcat, ncat = left.category, right.category, node.category
            absorption = ((ncat == rcat and render(lcat) == "PUNC")
                          or (ncat == lcat and render(rcat) == "PUNC"))
            union = ncat == lcat == rcat
            if not (absorption or union):
                raise SystemExit("sentence %s: stray non-derivable node %s -> %s %s"
                                 % (record.sid, render(ncat), render(lcat),
                                    render(rcat)))
    return flagged


def main():
    root = os.path.join(os.path.dirname(__file__), "..")
    trees = build_sentences()
    records = [SentenceRecord(str(i), tree,
                              [tok for _, tok in leaves(tree)])
               for i, tree in enumerate(trees, 1)]
    flagged = verify(records)
    path = os.path.join(root, "data", "treebank.txt")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    write_treebank(path, records)
    vocab = {token for record in records for token in record.tokens}
    print("wrote %d sentences (%d flagged nodes, %d word types) to %s"
          % (len(records), flagged, len(vocab), path))


if __name__ == "__main__":
    main()
