"""
Characteristic scores and the four reading classes
==================================================

Characteristic scores are means of iterated truncations: beta1 is the
mean of everything, beta2 the mean of what lies at or above beta1, and
so on. Classifying publications by these thresholds gives class shares
that are strikingly stable across fields -- roughly 69% poorly read,
21% fairly, 7% remarkably and 2.5% outstandingly read -- because the
underlying rescaled distribution is (close to) universal.
"""

import numpy as np

from readscale.corpus import group_by_field_year
from readscale.css import CLASS_NAMES, characteristic_scores, classify
from readscale.synth import FieldSpec, SynthSpec, generate_corpus

# --- a tiny worked example, by hand -------------------------------------

values = [1, 2, 3, 4, 10]
betas = characteristic_scores(values, k=3)
result = classify(values, betas)
print(f"counts {values}")
print(f"scores: beta1={betas[0]:g} beta2={betas[1]:g} beta3={betas[2]:g}")
for name, count, share in zip(CLASS_NAMES, result.class_counts, result.class_shares):
    print(f"  class {name:<3} {count} publication(s), {100 * share:.0f}%")

# --- the stable pattern on a 30-field corpus ----------------------------

# Thirty lognormal fields sharing one rescaled shape; their mean
# readerships span a factor of three, their shapes differ mildly.
rng = np.random.default_rng(33)
r0_grid = np.geomspace(12.0, 36.0, 30)
sigma2 = rng.uniform(0.95, 1.15, 30)
spec = SynthSpec(
    fields=tuple(
        FieldSpec(f"f{i:02d}", 500, float(np.log(r0_grid[i]) - sigma2[i] / 2), float(sigma2[i]))
        for i in range(30)
    ),
    year=2010,
    seed=7,
)
records = generate_corpus(spec)
pooled = np.array([r.reads for r in records], dtype=float)

betas = characteristic_scores(pooled, k=3)
result = classify(pooled, betas)
print(f"\n30 fields pooled ({pooled.size} records):")
print("scores: " + "  ".join(f"beta{j + 1}={b:.1f}" for j, b in enumerate(betas)))
for name, count, share in zip(CLASS_NAMES, result.class_counts, result.class_shares):
    print(f"  class {name:<3} {count:>6} publications, {100 * share:5.1f}%")

# Per-field shares barely move even though mean readership spans 3x.
print("\nclass shares field by field (I/II/III/IV, %):")
groups = group_by_field_year(records)
for key in sorted(groups)[:6]:
    reads = np.asarray(groups[key].reads, dtype=float)
    r = classify(reads, characteristic_scores(reads, k=3))
    shares = "/".join(f"{100 * s:.0f}" for s in r.class_shares)
    print(f"  {key.field}: mean {reads.mean():5.1f}  ->  {shares}")
print("  ... (24 more)")
