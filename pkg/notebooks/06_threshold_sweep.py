# %% [markdown]
# Real versus random edge removal
# ===============================
#
# For each threshold tau the tf-idf filtered network is compared with
# networks that lose the same number of edges at random. Filtering by
# tf-idf keeps users, thins the projection and sharpens communities.

# %%
from uonet import SweepConfig, make_planted_bipartite, run_sweep

pb = make_planted_bipartite(seed=0)
report = run_sweep(pb.graph, SweepConfig(thresholds=(0.1, 0.5, 1.0, 1.5, 2.0, 3.0),
                                         replicates=10, master_seed=0))

# %%
print("tau  removed  users(real/random)  density(real/random)  Q(real/random)")
for r in report.rows:
    print(f"{r.tau:3.1f}  {r.edges_removed_ratio:6.1%}  {r.real_users_remaining:4d} / "
          f"{r.random_users_remaining_mean:6.1f}    {r.real_projected_density:.3f} / "
          f"{r.random_projected_density_mean:.3f}        {r.real_modularity:.3f} / "
          f"{r.random_modularity_mean:.3f}")

# %% [markdown]
# The report serialises to JSON with provenance and writes one CSV per
# plotted series. Same config, same bytes.

# %%
import tempfile

paths = report.write(tempfile.mkdtemp())
print([p.name for p in paths])
print(report.series_csv("modularity.csv").splitlines()[:3])
