"""Client for a readership-count provider endpoint.

Resolves DOIs to reader counts over a small HTTP contract: POST a JSON
array of DOIs to ``{base_url}/lookup``, get back a JSON array of
``{doi, readers, match_probability}``. A count is accepted only when the
provider's match probability is strictly above the configured threshold;
otherwise the DOI is kept with ``reads=None`` so downstream code can see
it was looked up and rejected.

Results land in an append-only line-JSON cache (one object per line,
latest ``fetched_at`` wins), which makes reruns cheap and crash-safe:
a warm cache answers without any network traffic, and a torn write
corrupts at most its own line. Failures are returned but never cached,
so a transient outage does not poison later runs.
"""
from __future__ import annotations

import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import requests

__all__ = [
    "Cache",
    "FetchError",
    "FetchResult",
    "ProviderConfig",
    "RateLimiter",
    "cache_lookup",
    "fetch_counts",
]

log = logging.getLogger(__name__)

REQUEST_TIMEOUT = 30.0  # seconds per HTTP attempt
BACKOFF_BASE = 0.5  # first retry delay, doubled per attempt
BACKOFF_CAP = 8.0


class FetchError(RuntimeError):
    """Provider unreachable after all retries; partial cache is intact."""


@dataclass(frozen=True)
class ProviderConfig:
    """Where and how to talk to the provider.

    api_key_env names an environment variable; the key itself never
    appears in config files or flags. rate_limit is the maximum number
    of requests per second, enforced across all worker threads.
    """

    base_url: str
    api_key_env: str = "READSCALE_API_KEY"
    batch_size: int = 50
    rate_limit: float = 5.0
    max_retries: int = 3
    min_match_probability: float = 0.90

    def __post_init__(self):
        if not self.base_url:
            raise ValueError("base_url must be non-empty")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not self.rate_limit > 0:
            raise ValueError("rate_limit must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if not 0.0 <= self.min_match_probability <= 1.0:
            raise ValueError("min_match_probability must lie in [0, 1]")


@dataclass(frozen=True)
class FetchResult:
    """Outcome for one DOI.

    reads is None either because the match probability did not clear the
    threshold or because the lookup failed; ``error`` distinguishes the
    two. Only error-free results are cache-eligible.
    """

    doi: str
    reads: int | None
    match_probability: float
    fetched_at: float
    error: str | None = None


class RateLimiter:
    """Global minimum spacing of 1/rate seconds between grants.

    acquire() blocks (holding the lock, so grants are serialized) until
    at least the interval has passed since the previous grant on the
    monotonic clock. Spacing grants by 1/rate means any half-open
    one-second window contains at most ceil(rate) grants.
    """

    def __init__(self, rate: float):
        if not rate > 0:
            raise ValueError("rate must be > 0")
        self._interval = 1.0 / rate
        self._lock = threading.Lock()
        self._last: float | None = None

    def acquire(self) -> None:
        with self._lock:
            now = time.monotonic()
            if self._last is not None:
                wait = self._last + self._interval - now
                if wait > 0:
                    time.sleep(wait)
                    now = time.monotonic()
            self._last = now


class Cache:
    """Append-only line-JSON store of fetch results, keyed by DOI."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def read_all(self) -> dict[str, FetchResult]:
        """Latest entry per DOI; malformed lines are skipped with a warning."""
        entries: dict[str, FetchResult] = {}
        if not self.path.exists():
            return entries
        with open(self.path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                    result = FetchResult(
                        doi=str(raw["doi"]),
                        reads=None if raw["reads"] is None else int(raw["reads"]),
                        match_probability=float(raw["match_probability"]),
                        fetched_at=float(raw["fetched_at"]),
                    )
                except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                    log.warning("%s:%d: unreadable cache line skipped", self.path, lineno)
                    continue
                prior = entries.get(result.doi)
                if prior is None or result.fetched_at >= prior.fetched_at:
                    entries[result.doi] = result
        return entries

    def append(self, results: Iterable[FetchResult]) -> None:
        """Serialize writes; one JSON object per line, flushed per call."""
        lines = [
            json.dumps(
                {
                    "doi": r.doi,
                    "reads": r.reads,
                    "match_probability": r.match_probability,
                    "fetched_at": r.fetched_at,
                },
                sort_keys=True,
            )
            for r in results
            if r.error is None
        ]
        if not lines:
            return
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write("".join(line + "\n" for line in lines))


def cache_lookup(doi: str, cache: Cache) -> FetchResult | None:
    """Latest cached result for one DOI, or None."""
    return cache.read_all().get(doi)


def _apply_threshold(raw: dict, threshold: float) -> FetchResult:
    """Turn one provider response object into a FetchResult."""
    doi = str(raw["doi"])
    prob = float(raw["match_probability"])
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"match probability {prob} outside [0, 1]")
    readers = int(raw["readers"])
    if readers < 0:
        raise ValueError(f"negative reader count {readers}")
    reads = readers if prob > threshold else None
    return FetchResult(doi=doi, reads=reads, match_probability=prob, fetched_at=time.time())


def _failure(doi: str, reason: str) -> FetchResult:
    return FetchResult(
        doi=doi, reads=None, match_probability=0.0, fetched_at=time.time(), error=reason
    )


def _post_batch(
    batch: Sequence[str],
    config: ProviderConfig,
    limiter: RateLimiter,
    headers: dict[str, str],
) -> list[FetchResult]:
    """One batch: POST with retries, map responses, fill in failures."""
    url = config.base_url.rstrip("/") + "/lookup"
    last_error = "no attempt made"
    for attempt in range(config.max_retries + 1):
        if attempt > 0:
            time.sleep(min(BACKOFF_BASE * 2 ** (attempt - 1), BACKOFF_CAP))
        limiter.acquire()
        try:
            response = requests.post(
                url, json=list(batch), headers=headers, timeout=REQUEST_TIMEOUT
            )
        except requests.RequestException as exc:
            last_error = f"connection failed: {exc}"
            log.warning("attempt %d/%d: %s", attempt + 1, config.max_retries + 1, last_error)
            continue
        if response.status_code == 429 or response.status_code >= 500:
            last_error = f"HTTP {response.status_code}"
            log.warning("attempt %d/%d: %s", attempt + 1, config.max_retries + 1, last_error)
            continue
        if response.status_code >= 400:
            # A well-formed refusal: mark the batch failed, let the run go on.
            return [_failure(doi, f"HTTP {response.status_code}") for doi in batch]
        try:
            payload = response.json()
            by_doi = {str(item["doi"]): item for item in payload}
        except (ValueError, KeyError, TypeError) as exc:
            return [_failure(doi, f"unreadable response: {exc}") for doi in batch]
        results = []
        for doi in batch:
            item = by_doi.get(doi)
            if item is None:
                results.append(_failure(doi, "missing from response"))
                continue
            try:
                results.append(_apply_threshold(item, config.min_match_probability))
            except (KeyError, TypeError, ValueError) as exc:
                results.append(_failure(doi, f"bad response entry: {exc}"))
        return results
    raise FetchError(f"provider unreachable: {last_error} (after {config.max_retries + 1} attempts)")


def fetch_counts(
    dois: Sequence[str],
    config: ProviderConfig,
    cache: Cache,
    concurrency: int = 4,
) -> list[FetchResult]:
    """Resolve DOIs to reader counts, one FetchResult per input DOI.

    Cached DOIs are answered locally; the rest are queried in batches of
    config.batch_size over at most ``concurrency`` worker threads sharing
    one rate limiter. Every successful lookup (matched or below
    threshold) is appended to the cache as its batch completes, so an
    interrupted run keeps what it already paid for.

    Raises FetchError if the provider cannot be reached at all for some
    batch; results cached before that point remain on disk.
    """
    if concurrency < 1:
        raise ValueError("concurrency must be >= 1")
    known = cache.read_all()
    missing = sorted({doi for doi in dois if doi not in known})
    if missing:
        key = os.environ.get(config.api_key_env, "")
        headers = {"Authorization": f"Bearer {key}"} if key else {}
        limiter = RateLimiter(config.rate_limit)
        batches = [
            missing[i : i + config.batch_size]
            for i in range(0, len(missing), config.batch_size)
        ]

        def run_batch(batch: Sequence[str]) -> list[FetchResult]:
            results = _post_batch(batch, config, limiter, headers)
            cache.append(results)  # failures are filtered out inside
            return results

        with ThreadPoolExecutor(max_workers=min(concurrency, len(batches))) as pool:
            for batch_results in pool.map(run_batch, batches):
                for result in batch_results:
                    known[result.doi] = result
    return [known[doi] for doi in dois]
