"""Error versus noise level on a log-log scale.

The fitted slope should track the smoothness of the true solution: the
smoother variant converges faster. Variant (i) is expected to be the
smoothest, but its discrete solution carries a grid-offset tail that
flattens the observed slope at m = 400.
"""

from hilbert_iter.bench import RateStudyConfig, cmd_rates

for variant in ("ii", "iii", "i"):
    res = cmd_rates(RateStudyConfig(variant=variant, seeds=tuple(range(1, 6))))["IIM/A1"]
    print(f"variant ({variant}): slope {res['slope']:.3f}")
    for d, e in zip(res["deltas"], res["medians"]):
        print(f"    delta={d:.2e}  median error={e:.3e}")
