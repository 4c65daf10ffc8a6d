"""
Provider Client Module - Embedding provider wrapper with an on-disk cache.
Every network call for embeddings goes through this module.
"""

import asyncio
import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, asdict
from typing import Dict, List, Optional

import httpx
from google import genai
from tenacity import AsyncRetrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from config import (
    BACKOFF_BASE, BATCH_SIZE, CACHE_DIR, CREDENTIAL_ENV, MAX_IN_FLIGHT, MAX_RETRIES,
    MODEL_NAME, PROVIDER_BACKEND, PROVIDER_ENDPOINT, REQUEST_TIMEOUT,
)
from embedding_geometry import EmbeddingSet
from utils import SemwaveError

logger = logging.getLogger(__name__)

BACKENDS = ("http", "gemini")


@dataclass(frozen=True)
class ProviderConfig:
    """Where and how to fetch embeddings."""
    endpoint: str
    model: str
    credential_env: str
    max_in_flight: int
    cache_dir: str
    backend: str = "http"
    batch_size: int = BATCH_SIZE
    timeout: float = REQUEST_TIMEOUT
    max_retries: int = MAX_RETRIES
    backoff_base: float = BACKOFF_BASE

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ProviderConfigError(f"max_in_flight must be >= 1, got {self.max_in_flight}")
        if self.batch_size < 1:
            raise ProviderConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_retries < 1:
            raise ProviderConfigError(f"max_retries must be >= 1, got {self.max_retries}")
        if self.backend not in BACKENDS:
            raise ProviderConfigError(f"backend must be one of {BACKENDS}, got {self.backend!r}")

    @classmethod
    def from_env(cls, **overrides) -> "ProviderConfig":
        """Build a config from config.py values, with keyword overrides."""
        values = {
            "endpoint": PROVIDER_ENDPOINT,
            "model": MODEL_NAME,
            "credential_env": CREDENTIAL_ENV,
            "max_in_flight": MAX_IN_FLIGHT,
            "cache_dir": CACHE_DIR,
            "backend": PROVIDER_BACKEND,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> Dict:
        return asdict(self)


class EmbeddingCache:
    """
    One JSON file per (model, token), named by the SHA-256 of both.
    Writes go through a temp file and an atomic rename, so readers never
    see a partial entry.
    """

    def __init__(self, cache_dir: str):
        self.cache_dir = cache_dir

    @staticmethod
    def key(model: str, token: str) -> str:
        return hashlib.sha256(f"{model}\x00{token}".encode("utf-8")).hexdigest()

    def _path(self, model: str, token: str) -> str:
        return os.path.join(self.cache_dir, f"{self.key(model, token)}.json")

    def get(self, model: str, token: str) -> Optional[List[float]]:
        """Return the cached vector, or None on a miss."""
        path = self._path(model, token)
        if not os.path.exists(path):
            return None
        try:
            with open(path, "r", encoding="utf-8") as f:
                entry = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning("ignoring unreadable cache entry %s: %s", path, e)
            return None
        if entry.get("model") != model or entry.get("token") != token:
            return None
        return entry["vector"]

    def put(self, model: str, token: str, vector: List[float]) -> None:
        """Store a vector atomically."""
        os.makedirs(self.cache_dir, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump({"model": model, "token": token, "vector": list(vector)}, f)
            os.replace(tmp, self._path(model, token))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


class EmbeddingProviderClient:
    """
    Wrapper around an embedding provider.
    Deduplicates tokens, serves warm entries from the cache, and sends the
    misses in batches with at most max_in_flight requests outstanding.
    """

    def __init__(self, config: ProviderConfig,
                 transport: Optional[httpx.AsyncBaseTransport] = None):
        """
        Initialize the provider client.

        Args:
            config: Provider settings
            transport: Optional httpx transport (tests pass a MockTransport)
        """
        self.config = config
        self.cache = EmbeddingCache(config.cache_dir)
        self.transport = transport
        self.request_count = 0
        self._genai_client = None

    def _credential(self) -> str:
        api_key = os.environ.get(self.config.credential_env)
        if not api_key:
            raise CredentialError(
                f"credential missing: environment variable {self.config.credential_env} is not set"
            )
        return api_key

    async def _post_batch(self, client: httpx.AsyncClient, texts: List[str],
                          api_key: str) -> List[List[float]]:
        """
        Send one batch to the HTTP endpoint, retrying transport failures.

        Args:
            client: Shared async HTTP client
            texts: Tokens in this batch
            api_key: Bearer credential

        Returns:
            One float array per input text
        """
        retrying = AsyncRetrying(
            stop=stop_after_attempt(self.config.max_retries),
            wait=wait_exponential(multiplier=self.config.backoff_base, max=30),
            retry=retry_if_exception_type(httpx.TransportError),
            reraise=True,
        )
        try:
            async for attempt in retrying:
                with attempt:
                    self.request_count += 1
                    if attempt.retry_state.attempt_number > 1:
                        logger.warning("retrying batch of %d (attempt %d)",
                                       len(texts), attempt.retry_state.attempt_number)
                    response = await client.post(
                        self.config.endpoint,
                        headers={"Authorization": f"Bearer {api_key}"},
                        json={"model": self.config.model, "input": texts},
                    )
        except httpx.TransportError as e:
            raise ProviderError(
                f"transport failure after {self.config.max_retries} attempts: {e}"
            ) from e

        if response.status_code >= 400:
            # Provider payload is surfaced verbatim
            raise ProviderError(response.text)
        return self._parse_rows(response)

    @staticmethod
    def _parse_rows(response: httpx.Response) -> List[List[float]]:
        try:
            payload = response.json()
        except json.JSONDecodeError as e:
            raise ProviderError(f"provider returned non-JSON body: {response.text}") from e
        if isinstance(payload, dict):
            if "embeddings" in payload:
                payload = payload["embeddings"]
            elif "data" in payload:
                payload = [item["embedding"] for item in payload["data"]]
        if not isinstance(payload, list) or not all(isinstance(row, list) for row in payload):
            raise ProviderError(f"unexpected provider payload: {response.text}")
        return [[float(v) for v in row] for row in payload]

    async def _gemini_batch(self, texts: List[str], api_key: str) -> List[List[float]]:
        if self._genai_client is None:
            self._genai_client = genai.Client(api_key=api_key)
        self.request_count += 1
        try:
            response = await asyncio.to_thread(
                self._genai_client.models.embed_content,
                model=self.config.model,
                contents=texts,
            )
        except Exception as e:
            raise ProviderError(str(e)) from e
        return [list(e.values) for e in response.embeddings]

    async def fetch(self, tokens: List[str]) -> EmbeddingSet:
        """
        Fetch one embedding per distinct token.

        Args:
            tokens: Tokens to embed; duplicates are collapsed, order kept

        Returns:
            EmbeddingSet keyed by token
        """
        unique = list(dict.fromkeys(tokens))
        if not unique:
            raise ProviderError("no tokens to fetch")

        model = self.config.model
        vectors: Dict[str, List[float]] = {}
        missing = []
        for token in unique:
            cached = self.cache.get(model, token)
            if cached is None:
                missing.append(token)
            else:
                vectors[token] = cached
        logger.debug("cache: %d hits, %d misses", len(vectors), len(missing))

        if missing:
            api_key = self._credential()
            size = self.config.batch_size
            batches = [missing[i:i + size] for i in range(0, len(missing), size)]
            in_flight = asyncio.Semaphore(self.config.max_in_flight)

            async with httpx.AsyncClient(transport=self.transport,
                                         timeout=self.config.timeout) as client:
                async def run(batch: List[str]) -> List[List[float]]:
                    async with in_flight:
                        if self.config.backend == "gemini":
                            rows = await self._gemini_batch(batch, api_key)
                        else:
                            rows = await self._post_batch(client, batch, api_key)
                    if len(rows) != len(batch):
                        raise ProviderError(
                            f"provider returned {len(rows)} vectors for {len(batch)} inputs"
                        )
                    return rows

                tasks = [asyncio.create_task(run(b)) for b in batches]
                try:
                    results = await asyncio.gather(*tasks)
                except BaseException:
                    for task in tasks:
                        task.cancel()
                    await asyncio.gather(*tasks, return_exceptions=True)
                    raise

            for batch, rows in zip(batches, results):
                vectors.update(zip(batch, rows))

        # Dimensions are checked before anything new reaches the cache
        embeddings = EmbeddingSet.from_pairs(((t, vectors[t]) for t in unique), model_id=model)
        for token in missing:
            self.cache.put(model, token, vectors[token])
        return embeddings


def fetch_embeddings(config: ProviderConfig, tokens: List[str],
                     transport: Optional[httpx.AsyncBaseTransport] = None) -> EmbeddingSet:
    """
    Fetch embeddings for tokens, using the cache where possible.

    Args:
        config: Provider settings
        tokens: Non-empty token list
        transport: Optional httpx transport override

    Returns:
        EmbeddingSet with one entry per distinct token
    """
    client = EmbeddingProviderClient(config, transport=transport)
    return asyncio.run(client.fetch(tokens))


class ProviderError(SemwaveError):
    """Raised when the embedding provider fails or answers with an error."""
    pass


class CredentialError(ProviderError):
    """Raised when the configured credential variable is unset."""
    pass


class ProviderConfigError(ProviderError):
    """Raised for invalid provider settings."""
    pass
