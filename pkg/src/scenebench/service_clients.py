"""Clients for the text-generation and embedding services.

Both services speak a small JSON-over-HTTP protocol::

    POST {base}/v1/generate  {"subset", "count", "seed", "style_hints"} -> {"prompts": [str]}
    POST {base}/v1/embed     {"texts": [str]}                           -> {"embeddings": [[float]]}

When no endpoint is configured, deterministic offline fallbacks are used so
the pipeline runs without network access. The offline embedding is a hash of
the token multiset: it is stable and cheap, and carries no semantics. Use it
for tests only.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import requests

from ._data import load_table
from .errors import InputError, ProtocolError, ShortResponseError, TransportError

log = logging.getLogger(__name__)

GENERATE_BATCH = 50
EMBED_BATCH = 128
OFFLINE_DIM = 64
BACKOFF_BASE_S = 0.25
BACKOFF_FACTOR = 2.0
BACKOFF_JITTER = 0.2
TRANSIENT_STATUS = {429, 500, 502, 503, 504}

ENV_LLM_URL = "SCENEBENCH_LLM_URL"
ENV_EMBED_URL = "SCENEBENCH_EMBED_URL"
ENV_TOKEN = "SCENEBENCH_API_TOKEN"

U64 = 2**64


@dataclass(frozen=True)
class ServiceEndpoint:
    base_url: str
    timeout_ms: int = 30_000
    max_retries: int = 3
    auth_token: str | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.base_url:
            raise InputError("base_url must be non-empty")
        if self.timeout_ms < 1:
            raise InputError("timeout_ms must be >= 1")
        if not 0 <= self.max_retries <= 10:
            raise InputError("max_retries must lie in [0, 10]")

    def url(self, path: str) -> str:
        return self.base_url.rstrip("/") + path


@dataclass(frozen=True)
class GenerationRequest:
    subset: str
    count: int
    seed: int = 0
    style_hints: tuple[str, ...] = ()

    def __post_init__(self):
        if self.subset not in ("furniture", "manipuland"):
            raise InputError(f"unknown subset {self.subset!r}")
        if not 1 <= self.count <= 1000:
            raise InputError("count must lie in [1, 1000]")
        if not 0 <= self.seed < U64:
            raise InputError("seed must be a 64-bit unsigned integer")


def backoff_delay(attempt: int, rng: random.Random) -> float:
    """Delay in seconds before retry number ``attempt`` (0-based)."""
    jitter = 1.0 + rng.uniform(-BACKOFF_JITTER, BACKOFF_JITTER)
    return BACKOFF_BASE_S * BACKOFF_FACTOR**attempt * jitter


def post_json(
    ep: ServiceEndpoint,
    path: str,
    payload: Mapping,
    *,
    session: requests.Session | None = None,
    sleep: Callable[[float], None] = time.sleep,
    rng: random.Random | None = None,
) -> dict:
    """POST ``payload`` and return the decoded JSON body.

    Connection failures, timeouts and 429/5xx responses are retried up to
    ``ep.max_retries`` times with exponential backoff; anything else fails
    immediately.
    """
    rng = rng or random.Random()
    http = session or requests
    headers = {"Content-Type": "application/json"}
    if ep.auth_token:
        headers["Authorization"] = f"Bearer {ep.auth_token}"
    last_error: Exception | None = None
    for attempt in range(ep.max_retries + 1):
        if attempt:
            sleep(backoff_delay(attempt - 1, rng))
        try:
            resp = http.post(
                ep.url(path), json=dict(payload), headers=headers, timeout=ep.timeout_ms / 1000
            )
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_error = exc
            log.warning("%s attempt %d failed: %s", path, attempt + 1, exc)
            continue
        if resp.status_code in TRANSIENT_STATUS:
            last_error = TransportError(f"HTTP {resp.status_code} from {ep.url(path)}")
            log.warning("%s attempt %d got HTTP %d", path, attempt + 1, resp.status_code)
            continue
        if not 200 <= resp.status_code < 300:
            raise TransportError(f"HTTP {resp.status_code} from {ep.url(path)}")
        try:
            body = resp.json()
        except ValueError as exc:
            raise ProtocolError(f"response from {ep.url(path)} is not JSON") from exc
        if not isinstance(body, dict):
            raise ProtocolError("response body must be a JSON object")
        return body
    raise TransportError(
        f"{ep.url(path)} unreachable after {ep.max_retries + 1} attempts: {last_error}"
    )


# -- generation -------------------------------------------------------------


def generate_prompts(
    ep: ServiceEndpoint | None, req: GenerationRequest, **http_kwargs
) -> list[str]:
    """Return exactly ``req.count`` scene-description prompts."""
    if ep is None:
        return offline_prompts(req)
    texts: list[str] = []
    batch_index = 0
    while len(texts) < req.count:
        n = min(GENERATE_BATCH, req.count - len(texts))
        payload = {
            "subset": req.subset,
            "count": n,
            "seed": (req.seed + batch_index) % U64,
            "style_hints": list(req.style_hints),
        }
        body = post_json(ep, "/v1/generate", payload, **http_kwargs)
        prompts = body.get("prompts")
        if not isinstance(prompts, list) or not all(isinstance(p, str) and p for p in prompts):
            raise ProtocolError("'prompts' must be a list of non-empty strings")
        if len(prompts) < n:
            raise ShortResponseError(f"requested {n} prompts, service returned {len(prompts)}")
        texts.extend(prompts[:n])
        batch_index += 1
    return texts


def offline_prompts(req: GenerationRequest) -> list[str]:
    g = load_table("grammar.json")
    rng = random.Random(f"scenebench-prompts:{req.subset}:{req.seed}")
    templates = g[f"{req.subset}_templates"]
    relations = sorted(g["relations"].values())
    out = []
    for i in range(req.count):
        tpl = templates[rng.randrange(len(templates))]
        large = rng.sample(g["large_objects"], 3)
        small = rng.sample(g["small_objects"], 3)
        fields = {
            "room": rng.choice(g["rooms"]),
            "R0": rng.choice(relations),
            **{f"L{k}": v for k, v in enumerate(large)},
            **{f"S{k}": v for k, v in enumerate(small)},
        }
        text = tpl.format(**fields)
        if req.style_hints:
            text += f" Style: {req.style_hints[i % len(req.style_hints)]}."
        out.append(text)
    return out


# -- embedding --------------------------------------------------------------


def embed_texts(
    ep: ServiceEndpoint | None, texts: Sequence[str], **http_kwargs
) -> list[tuple[float, ...]]:
    """Embed every text; all returned vectors share one dimension."""
    if not texts:
        raise InputError("texts must be non-empty")
    for i, t in enumerate(texts):
        if not t:
            raise InputError(f"text {i} is empty")
    if ep is None:
        return [offline_embedding(t) for t in texts]

    vectors: list[tuple[float, ...]] = []
    for start in range(0, len(texts), EMBED_BATCH):
        chunk = list(texts[start : start + EMBED_BATCH])
        body = post_json(ep, "/v1/embed", {"texts": chunk}, **http_kwargs)
        embs = body.get("embeddings")
        if not isinstance(embs, list) or len(embs) != len(chunk):
            raise ProtocolError(f"expected {len(chunk)} embeddings in response")
        for e in embs:
            if not isinstance(e, list) or not e:
                raise ProtocolError("each embedding must be a non-empty list of numbers")
            try:
                vec = tuple(float(v) for v in e)
            except (TypeError, ValueError) as exc:
                raise ProtocolError("embedding entries must be numbers") from exc
            if not all(math.isfinite(v) for v in vec):
                raise ProtocolError("embedding contains non-finite entries")
            vectors.append(vec)
    dims = {len(v) for v in vectors}
    if len(dims) != 1:
        raise ProtocolError(f"mixed embedding dimensions {sorted(dims)}")
    return vectors


def normalize_tokens(text: str) -> list[str]:
    return sorted(text.lower().split())


def offline_embedding(text: str, dim: int = OFFLINE_DIM) -> tuple[float, ...]:
    key = "\x1f".join(normalize_tokens(text)).encode("utf-8")
    vec = []
    for j in range(dim):
        h = hashlib.blake2b(key + b"\x00" + j.to_bytes(4, "big"), digest_size=8).digest()
        vec.append(2.0 * int.from_bytes(h, "big") / (U64 - 1) - 1.0)
    return tuple(vec)


# -- configuration ----------------------------------------------------------


def endpoint_from_config(
    conf: Mapping | None, env_url: str, environ: Mapping[str, str] | None = None
) -> ServiceEndpoint | None:
    """Build an endpoint from a config block, letting env vars override it.

    Returns None (offline fallback) when no URL is configured anywhere.
    """
    environ = os.environ if environ is None else environ
    conf = dict(conf or {})
    url = environ.get(env_url) or conf.get("base_url")
    if not url:
        return None
    return ServiceEndpoint(
        base_url=url,
        timeout_ms=int(conf.get("timeout_ms", 30_000)),
        max_retries=int(conf.get("max_retries", 3)),
        auth_token=environ.get(ENV_TOKEN) or conf.get("auth_token"),
    )
