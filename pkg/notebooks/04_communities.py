# %% [markdown]
# Communities with Louvain
# ========================
#
# Louvain greedily moves nodes between communities while modularity rises,
# then merges communities into super-nodes and repeats. The seed fixes the
# node visit order; several restarts guard against poor local optima.

# %%
from uonet import USERS, filter_by_threshold, louvain, modularity, project, southern_women, tfidf_reweight

g = tfidf_reweight(southern_women())

# %% [markdown]
# On the raw projection every woman who went to a popular event is linked
# to everyone else who did.

# %%
raw = louvain(project(g, USERS), seed=0)
print("unfiltered:", raw.community_count, "communities, Q = %.3f" % raw.modularity)

# %% [markdown]
# After filtering at tau = 1 the two known groups appear, with woman 16
# pruned because all her events were popular.

# %%
f = filter_by_threshold(g, 1.0)
part = louvain(project(f, USERS), seed=0)
for c in sorted(part.communities(), key=lambda c: min(map(int, c))):
    print(sorted(c, key=int))
print("Q = %.4f, levels = %d" % (part.modularity, part.levels))

# %% [markdown]
# The grouping does not depend on the seed.

# %%
{frozenset(map(frozenset, louvain(project(f, USERS), seed=s).communities())) for s in range(20)}.__len__()

# %% [markdown]
# ``modularity`` scores any labelling, e.g. a split by index.

# %%
pg = project(f, USERS)
modularity(pg, {u: int(int(u) > 9) for u in pg.nodes})
