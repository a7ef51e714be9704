# %% [markdown]
# One-mode projection
# ===================
#
# Two users are linked when they share an object; the edge weight counts
# the shared objects. A single popular object turns its audience into a
# clique, so projections are much denser than the bipartite network.

# %%
from uonet import (USERS, density, filter_by_threshold, make_planted_bipartite, project,
                   projected_density, tfidf_reweight)

pb = make_planted_bipartite(seed=0)
g = pb.graph
pg = project(g, USERS)
print(f"bipartite density {density(g):.3f}, user projection density {projected_density(pg):.3f}")

# %% [markdown]
# Without the three popular objects the two user blocks never meet.

# %%
alone = project(make_planted_bipartite(popular_objects=0, seed=0).graph, USERS)
print(f"without popular objects: {alone.n_edges} edges, density {projected_density(alone):.3f}")

# %% [markdown]
# tf-idf filtering removes the popular objects first and the projection
# thins out accordingly.

# %%
w = tfidf_reweight(g)
for tau in (0.1, 0.5, 1.0, 1.5, 2.0):
    p = project(filter_by_threshold(w, tau), USERS)
    print(f"tau {tau:3.1f}  edges {p.n_edges:5d}  density {projected_density(p):.3f}")
