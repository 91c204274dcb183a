"""How subspace projection turns topic vectors into novelty scores.

The projector is built from the labelled documents' topic vectors; any
document whose topic vector leans out of that subspace scores close to 1,
anything topically familiar scores close to 0.
"""

import numpy as np

from litscreen.novelty import (
    assign_topic,
    fit_projector,
    novelty_score,
    novelty_scores,
    topics_discovered,
)

# three labelled documents, all concentrated on topic 0 of a 4-topic space
V = np.array(
    [
        [0.94, 0.02, 0.02, 0.02],  # labelled
        [0.90, 0.04, 0.03, 0.03],  # labelled
        [0.88, 0.06, 0.03, 0.03],  # labelled
        [0.05, 0.90, 0.03, 0.02],  # unseen topic 1
        [0.02, 0.03, 0.92, 0.03],  # unseen topic 2
        [0.70, 0.20, 0.05, 0.05],  # mostly familiar
    ]
)
labelled = [0, 1, 2]

proj = fit_projector(V, labelled, t=2)
print(f"projector: {proj.t} component(s) from {proj.source_count} labelled rows"
      f" (rank reduced: {proj.rank_reduced})")

for row in range(3, 6):
    score = novelty_score(proj, V[row])
    print(f"document {row}: argmax topic {assign_topic(V[row])}, novelty {score:.3f}")

print("\nbatch scoring matches:", np.round(novelty_scores(proj, V[3:]), 3).tolist())
print("topics discovered so far:", topics_discovered(V, labelled))
print("after labelling document 3:", topics_discovered(V, labelled + [3]))

# the hand-checkable two-topic case
proj2 = fit_projector(np.array([[1.0, 0.0], [1.0, 0.0]]), [0, 1], t=1)
v = np.array([0.6, 0.4])
print(f"\ntwo-topic fixture: novelty of {v.tolist()} = {novelty_score(proj2, v):.4f}"
      " (= 1 - 0.6 / sqrt(0.52))")
