"""
Scoring plans and comparing models
==================================

Four measures compare a generated plan with a reference one, and
nonparametric tests decide whether models differ.
"""

import numpy as np

from cas.actionseq import ActionInstance
from cas.domain import load_problem
from cas.metrics import compare
from cas.simulator import final_state
from cas.stats import bonferroni, friedman, wilcoxon_signed_rank


def a(name, *args):
    return ActionInstance(name, args)


home = load_problem("home")
reference = [a("move_to", "entrance"), a("grab", "mail"), a("put_on", "mail", "table")]
candidate = [a("move_to", "entrance"), a("find", "mail"), a("grab", "mail")]

values = compare(
    reference,
    candidate,
    home.initial,
    final_state(home, reference),
    final_state(home, candidate),
)
for name, value in values.as_dict().items():
    print(f"{name:>24}: {value:.3f}")

###############################################################################
# Friedman test over records (rows) and models (columns), then pairwise
# Wilcoxon tests with a Bonferroni correction for the six pairs.

rng = np.random.default_rng(0)
scores = rng.normal(size=(30, 4)) + np.array([0.0, 0.1, 0.5, 1.0])
fr = friedman(scores)
print(f"\nfriedman chi2({fr.df}) = {fr.statistic:.2f}, p = {fr.p_value:.4f}")

labels = ["A", "B", "C", "D"]
for i in range(4):
    for j in range(i + 1, 4):
        w = wilcoxon_signed_rank(scores[:, i], scores[:, j])
        print(f"{labels[i]} vs {labels[j]}: W = {w.statistic:.1f}, corrected p = {bonferroni(w.p_value, 6):.4f}")
