"""Six-attribute toxicity scoring with pluggable backends.

One scorer interface, three backends: a Perspective-compatible remote HTTP
endpoint, a persistent append-only cache, and a deterministic lexicon mock
so the whole pipeline runs offline.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
import time
from dataclasses import dataclass

import requests

from .errors import (
    BackendProtocolError,
    BackendUnavailableError,
    CacheMissError,
    OversizeTextError,
    SchemaError,
    ScoringError,
)
from .extract import Comment
from .util import utf8_len

ATTRIBUTES = ("toxicity", "severe_toxicity", "identity_attack",
              "insult", "profanity", "threat")
API_ATTRIBUTE_NAMES = ("TOXICITY", "SEVERE_TOXICITY", "IDENTITY_ATTACK",
                       "INSULT", "PROFANITY", "THREAT")
SUPPORTED_LANGUAGES = ("en", "de", "fr", "es", "it", "ru")
MAX_SCORABLE_BYTES = 20_480

# default lexicon for the mock backend; deliberately mild
DEFAULT_MOCK_LEXICON = frozenset({
    "idiot", "stupid", "moron", "dumb", "fool", "pathetic", "worthless",
    "trash", "garbage", "scum", "loser", "awful", "vile", "hate", "shut",
})


@dataclass(frozen=True)
class AttributeScores:
    toxicity: float
    severe_toxicity: float
    identity_attack: float
    insult: float
    profanity: float
    threat: float

    def __post_init__(self):
        for name in ATTRIBUTES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} score {value} outside [0, 1]")

    def as_tuple(self):
        return tuple(getattr(self, name) for name in ATTRIBUTES)

    def max_score(self) -> float:
        return max(self.as_tuple())


@dataclass(frozen=True)
class ScoredComment:
    comment: Comment
    scores: AttributeScores
    scorer_id: str


def is_toxic(scores: AttributeScores, threshold: float = 0.8) -> bool:
    """A comment is toxic when any of the six attributes reaches the
    threshold; "at least" is inclusive, so score == threshold is toxic."""
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold {threshold} outside (0, 1)")
    return scores.max_score() >= threshold


class MockScorer:
    """Deterministic offline backend: every attribute score is the fraction
    of whitespace-delimited words found in the lexicon (case-insensitive)."""

    def __init__(self, lexicon=DEFAULT_MOCK_LEXICON, scorer_id=None):
        self.lexicon = frozenset(w.lower() for w in lexicon)
        if scorer_id is None:
            digest = hashlib.sha256("\n".join(sorted(self.lexicon)).encode()).hexdigest()
            scorer_id = f"mock:{digest[:12]}"
        self.scorer_id = scorer_id

    def score(self, text: str, language: str) -> AttributeScores:
        words = re.findall(r"\w+", text.lower())
        fraction = sum(w in self.lexicon for w in words) / len(words) if words else 0.0
        return AttributeScores(*([fraction] * 6))


class RemoteScorer:
    """Perspective-compatible HTTP client with retry and backoff.

    Transient failures (connection errors, 429, 5xx) are retried with
    exponential backoff up to ``max_attempts``; a response that is not the
    expected JSON shape is a hard error.
    """

    RETRYABLE_STATUS = (429, 500, 502, 503, 504)

    def __init__(self, endpoint: str, api_key: str | None = None, *,
                 max_attempts: int = 4, backoff_base: float = 0.5,
                 timeout: float = 30.0, session=None, sleep=time.sleep):
        self.endpoint = endpoint
        self.api_key = api_key
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.timeout = timeout
        self.scorer_id = f"remote:{endpoint}"
        self.requests_made = 0
        self._session = session if session is not None else requests.Session()
        self._sleep = sleep

    def _request_body(self, text, language):
        return {
            "comment": {"text": text},
            "languages": [language],
            "requestedAttributes": {name: {} for name in API_ATTRIBUTE_NAMES},
        }

    def score(self, text: str, language: str) -> AttributeScores:
        params = {"key": self.api_key} if self.api_key else None
        last_failure = None
        for attempt in range(self.max_attempts):
            if attempt:
                self._sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                response = self._session.post(
                    self.endpoint, params=params,
                    json=self._request_body(text, language),
                    timeout=self.timeout)
            except requests.RequestException as exc:
                last_failure = str(exc)
                continue
            self.requests_made += 1
            if response.status_code in self.RETRYABLE_STATUS:
                last_failure = f"HTTP {response.status_code}"
                continue
            if response.status_code != 200:
                raise BackendProtocolError(
                    f"scoring endpoint answered HTTP {response.status_code}")
            return self._parse(response)
        raise BackendUnavailableError(
            f"scoring endpoint unavailable after {self.max_attempts} attempts "
            f"(last failure: {last_failure})")

    def _parse(self, response) -> AttributeScores:
        try:
            body = response.json()
            by_attr = body["attributeScores"]
            values = [float(by_attr[name]["summaryScore"]["value"])
                      for name in API_ATTRIBUTE_NAMES]
            return AttributeScores(*values)
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendProtocolError(f"malformed scorer response: {exc}") from exc


class ScoreCache:
    """Append-only file of (content hash, scores) records, one JSON object
    per line: {"key": ..., "scorer": ..., "scores": [6 floats]}.

    Safe for concurrent readers; writes are serialized with a lock.
    """

    def __init__(self, path):
        self.path = str(path)
        self._lock = threading.Lock()
        self._entries: dict[str, AttributeScores] = {}
        self.scorer_ids: set = set()
        self._load()

    def _load(self):
        try:
            with open(self.path, "r", encoding="utf-8") as handle:
                for lineno, line in enumerate(handle, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        record = json.loads(line)
                        self._entries[record["key"]] = AttributeScores(*record["scores"])
                        self.scorer_ids.add(record["scorer"])
                    except (json.JSONDecodeError, KeyError, TypeError) as exc:
                        raise SchemaError(f"{self.path}:{lineno}: bad cache record: {exc}")
        except FileNotFoundError:
            pass

    @staticmethod
    def content_key(scorer_id: str, language: str, text: str) -> str:
        payload = f"{scorer_id}\n{language}\n{text}".encode("utf-8")
        return hashlib.sha256(payload).hexdigest()

    def __len__(self):
        return len(self._entries)

    def get(self, key: str):
        return self._entries.get(key)

    def put(self, key: str, scorer_id: str, scores: AttributeScores):
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = scores
            self.scorer_ids.add(scorer_id)
            record = {"key": key, "scorer": scorer_id, "scores": list(scores.as_tuple())}
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(record, sort_keys=True) + "\n")


class CachedScorer:
    """Cache wrapper: hits never touch the inner backend. With no inner
    scorer this is the cache-only backend and misses are hard errors."""

    def __init__(self, cache: ScoreCache, inner=None, scorer_id=None):
        self.cache = cache
        self.inner = inner
        self.scorer_id = scorer_id or (inner.scorer_id if inner else "cache")
        self.hits = 0
        self.misses = 0

    def contains(self, text: str, language: str) -> bool:
        key = ScoreCache.content_key(self.scorer_id, language, text)
        return self.cache.get(key) is not None

    def score(self, text: str, language: str) -> AttributeScores:
        key = ScoreCache.content_key(self.scorer_id, language, text)
        cached = self.cache.get(key)
        if cached is not None:
            self.hits += 1
            return cached
        self.misses += 1
        if self.inner is None:
            raise CacheMissError(f"no cached scores for key {key[:16]}…")
        scores = self.inner.score(text, language)
        self.cache.put(key, self.scorer_id, scores)
        return scores


def score(text: str, language: str, scorer) -> AttributeScores:
    """Score one text with the configured backend.

    Oversize texts (UTF-8 length > 20,480 bytes) are rejected with a
    distinct OversizeTextError so callers can skip and count them.
    """
    if utf8_len(text) > MAX_SCORABLE_BYTES:
        raise OversizeTextError(
            f"text is {utf8_len(text)} bytes, over the {MAX_SCORABLE_BYTES} limit")
    if language not in SUPPORTED_LANGUAGES:
        raise ValueError(f"unsupported language {language!r}")
    return scorer.score(text, language)


class RateLimiter:
    """Paces calls so the sustained rate stays at or below requests/second."""

    def __init__(self, rate: float, clock=time.monotonic, sleep=time.sleep):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.interval = 1.0 / rate
        self._clock = clock
        self._sleep = sleep
        self._next_slot = None

    def wait(self):
        now = self._clock()
        if self._next_slot is None or now >= self._next_slot:
            self._next_slot = now + self.interval
            return
        self._sleep(self._next_slot - now)
        self._next_slot += self.interval


@dataclass
class CorpusScoreStats:
    scored: int = 0
    oversize: int = 0

    def report(self) -> str:
        return f"{self.scored} scored, {self.oversize} skipped oversize"


def score_corpus(comments, scorer, language: str, rate_limit: float | None = None,
                 stats: CorpusScoreStats | None = None,
                 clock=time.monotonic, sleep=time.sleep):
    """Stream ScoredComment values for every in-size comment.

    Oversize comments are counted in ``stats`` and skipped. The rate limit
    applies to backend requests only: cache hits are free. Hard scorer
    errors propagate, naming the offending comment.
    """
    limiter = RateLimiter(rate_limit, clock=clock, sleep=sleep) if rate_limit else None
    for comment in comments:
        if utf8_len(comment.clean_text) > MAX_SCORABLE_BYTES:
            if stats is not None:
                stats.oversize += 1
            continue
        cached = (isinstance(scorer, CachedScorer)
                  and scorer.contains(comment.clean_text, language))
        if limiter is not None and not cached:
            limiter.wait()
        try:
            scores = score(comment.clean_text, language, scorer)
        except OversizeTextError:
            if stats is not None:
                stats.oversize += 1
            continue
        except (BackendProtocolError, CacheMissError) as exc:
            raise ScoringError(
                f"comment page={comment.page_id} rev={comment.revision_id}: {exc}"
            ) from exc
        if stats is not None:
            stats.scored += 1
        yield ScoredComment(comment=comment, scores=scores, scorer_id=scorer.scorer_id)
