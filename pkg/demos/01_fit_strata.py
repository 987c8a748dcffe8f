"""
Fitting lognormal models to readership strata
=============================================

Two hand-sized strata from one publication year: a small mathematics
field with low, heavily tied counts, and a surgery field an order of
magnitude more read. Each is fit by maximum likelihood on the log
counts, and the log-normality hypothesis is checked with a
Shapiro-Wilk test, Bonferroni-corrected across the strata tested.
"""

import numpy as np

from readscale.corpus import PublicationRecord, group_by_field_year, group_stats
from readscale.distfit import fit_lognormal, test_lognormality

# --- build a tiny two-stratum corpus -----------------------------------

rng = np.random.default_rng(2046)
records = []
for field, r0, n in (("Mathematics", 6.2, 85), ("Surgery", 21.6, 96)):
    counts = np.floor(rng.lognormal(np.log(r0) - 0.53, np.sqrt(1.06), n) + 0.5)
    records += [
        PublicationRecord(id=f"{field[:4].lower()}-{i:04d}", field=field, year=2010, reads=int(c))
        for i, c in enumerate(counts)
    ]

groups = group_by_field_year(records)

# --- fit each stratum and test log-normality ---------------------------

# With two testable strata the Bonferroni family size is 2, so each test
# runs at alpha/2.
m = len(groups)
print(f"{'field':<14} {'n':>4} {'mean':>7} {'max':>5} {'mu':>7} {'sigma2':>7} {'SW p':>7} reject")
for key in sorted(groups):
    group = groups[key]
    stats = group_stats(group)
    fit = fit_lognormal(group.reads)
    test = test_lognormality(group.reads, alpha=0.05, m=m)
    print(
        f"{key.field:<14} {stats.n:>4} {stats.r_mean:>7.1f} {stats.r_max:>5.0f} "
        f"{fit.mu:>7.3f} {fit.sigma2:>7.3f} {test.p:>7.3f} {test.reject}"
    )

# The two strata differ more than three-fold in mean readership, yet neither fit is
# rejected at the corrected level: same family, different location. Note
# how the low-count field sits much closer to the boundary -- rounding to
# whole counts and the resulting ties weigh on the test exactly where
# counts are small. That is the starting point for the rescaling analysis
# in the next demo.
