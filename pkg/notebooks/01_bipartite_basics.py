# %% [markdown]
# Bipartite user-object networks
# ==============================
#
# A network of users and the objects they touch (artists, tags, events).
# Edges only run between the two sides and carry a weight such as a play
# count or a rating.

# %%
import numpy as np

from uonet import (USERS, OBJECTS, average_degrees, degree_sequence, density,
                   southern_women, top_objects)

g = southern_women()
g

# %% [markdown]
# 18 women and the 14 social events they attended. Density is the share of
# possible user-object pairs that are actually linked.

# %%
print("users", g.n_users, "events", g.n_objects, "edges", g.n_edges)
print("mean degrees", average_degrees(g))
print("density %.3f" % density(g))

# %% [markdown]
# A few events are attended by most women. These popular objects matter
# later: every pair of their attendees becomes linked in the projection.

# %%
for t in top_objects(g, 4):
    print(f"{t.object:>4}  {t.degree:2d} attendees  {t.fraction:.0%} of users")

# %%
np.bincount(degree_sequence(g, OBJECTS)), np.bincount(degree_sequence(g, USERS))

# %% [markdown]
# Reading your own data: a delimited ``user<TAB>object[<TAB>weight]`` file.

# %%
import tempfile
from pathlib import Path

from uonet import IngestOptions, read_edge_list

path = Path(tempfile.mkdtemp()) / "ratings.csv"
path.write_text("user,movie,rating\nann,alien,5\nann,heat,2\nbob,alien,4\nbob,alien,1\n")
graph, summary = read_edge_list(path, IngestOptions(delimiter=",", has_header=True))
print(summary.as_dict())
list(graph.edges())
