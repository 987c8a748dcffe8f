"""Cross-field readership and citation count distributions.

A toolkit for testing whether count distributions from very different
fields share one underlying shape: lognormal maximum-likelihood fits,
Shapiro-Wilk log-normality testing, mean-rescaling with distribution
collapse and CCDF export, characteristic-score classes, global top-z%
shares with their tolerance bands, seeded synthetic corpora, file
ingestion and a readership-provider client. The ``readscale`` command
exposes the pipeline end to end.
"""
from .corpus import (
    DuplicateIdError,
    EmptyCorpusError,
    Group,
    GroupKey,
    GroupStats,
    PublicationRecord,
    group_by_field_year,
    group_stats,
)
from .css import CLASS_NAMES, CssResult, characteristic_scores, class_labels, classify
from .distfit import (
    DegenerateSampleError,
    LognormalFit,
    ZeroPolicy,
    fit_lognormal,
    test_lognormality,
)
from .fetch import Cache, FetchError, FetchResult, ProviderConfig, RateLimiter, cache_lookup, fetch_counts
from .ingest import IngestError, IngestReport, SchemaError, parse_records, validate, write_records
from .rescale import (
    AllUnreadGroupError,
    CcdfCurve,
    RescaledSample,
    ccdf,
    ccdf_filename,
    collapse,
    rescale_group,
    write_ccdf_tsv,
)
from .swilk import SwTestResult, UnsupportedSizeError, ZeroVarianceError, shapiro_wilk
from .synth import FieldSpec, SynthSpec, generate_corpus, generator_metadata, lognormal_mean
from .topz import TopZReport, sigma_z, top_membership, top_share_report

__version__ = "0.1.0"

__all__ = [
    "AllUnreadGroupError",
    "CLASS_NAMES",
    "Cache",
    "CcdfCurve",
    "CssResult",
    "DegenerateSampleError",
    "DuplicateIdError",
    "EmptyCorpusError",
    "FetchError",
    "FetchResult",
    "FieldSpec",
    "Group",
    "GroupKey",
    "GroupStats",
    "IngestError",
    "IngestReport",
    "LognormalFit",
    "ProviderConfig",
    "PublicationRecord",
    "RateLimiter",
    "RescaledSample",
    "SchemaError",
    "SwTestResult",
    "SynthSpec",
    "TopZReport",
    "UnsupportedSizeError",
    "ZeroPolicy",
    "ZeroVarianceError",
    "cache_lookup",
    "ccdf",
    "ccdf_filename",
    "characteristic_scores",
    "class_labels",
    "classify",
    "collapse",
    "fetch_counts",
    "fit_lognormal",
    "generate_corpus",
    "generator_metadata",
    "group_by_field_year",
    "group_stats",
    "lognormal_mean",
    "parse_records",
    "rescale_group",
    "shapiro_wilk",
    "sigma_z",
    "test_lognormality",
    "top_membership",
    "top_share_report",
    "validate",
    "write_ccdf_tsv",
    "write_records",
    "__version__",
]
