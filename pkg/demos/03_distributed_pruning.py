"""
Two-round distributed pruning
=============================

``domep`` shuffles the classifiers into ``m`` balanced groups, prunes each
group on its own simulated machine, prunes the union of the group answers
once more and keeps the best of the ``m + 1`` candidates.
"""

from entroprune import ObjectiveParams, benchmark_speedup, comep, domep, partition, synthetic_ensemble

# %% Balanced groups: 10 classifiers on 3 machines give sizes 4, 3, 3.
print(partition(10, 3, seed=0).groups)

# %% One distributed run, with every candidate on display.
ens = synthetic_ensemble(100, 2000, base_accuracy=0.7, correlation=0.3, seed=7)
params = ObjectiveParams(k=8)
res = domep(ens, params, m=3, seed=0)
for name, sel in res.candidates.items():
    mark = "  <- chosen" if name == res.winner else ""
    print(f"{name:8s} {sorted(sel.indices)}  objective {res.scores[name]:.3f}{mark}")
print(f"centralized objective {comep(ens, params).tdas:.3f}")

# %% Timing. Machines are simulated in one process, so the distributed time
# is the critical path: partition + slowest group + union round + final pick.
for row in benchmark_speedup(ens, params, [1, 2, 3], repetitions=5):
    print(f"m={row['m']}: centralized {row['comep_time_s'] * 1e3:.1f} ms, "
          f"distributed {row['time_s'] * 1e3:.1f} ms, speedup {row['speedup']:.2f}, "
          f"pair terms {row['comep_eval_count']} vs largest group {row['eval_count']}")
