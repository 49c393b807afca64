"""Chat-completions client over plain httpx.

Every vendor the engine talks to exposes the OpenAI-style
``/chat/completions`` surface, so one client covers them all through a
base-URL swap. Transport errors, 429 and 5xx responses are retried with
exponential backoff; everything else fails fast.
"""

from __future__ import annotations

import logging
from typing import Any, Dict

import httpx
from tenacity import (
    AsyncRetrying,
    RetryCallState,
    Retrying,
    retry_if_exception_type,
    stop_after_attempt,
    wait_exponential,
)

from ..core.errors import AuthRejected, MalformedResponse, RateLimited, TransportError
from ..infra.tracing import traced_span
from .base import ChatRequest

logger = logging.getLogger(__name__)

RETRY_STATUS_CODES = frozenset({429, 500, 502, 503, 504})
AUTH_STATUS_CODES = frozenset({401, 403})


class _RetryableStatus(Exception):
    def __init__(self, status_code: int, body: str) -> None:
        super().__init__(f"HTTP {status_code}: {body[:200]}")
        self.status_code = status_code


def _log_retry(state: RetryCallState) -> None:
    exc = state.outcome.exception() if state.outcome else None
    logger.warning("chat endpoint failed (%s); attempt %d", exc, state.attempt_number)


def parse_chat_payload(data: Any) -> str:
    """Pull ``choices[0].message.content`` out of a response body."""

    try:
        content = data["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise MalformedResponse(f"response body lacks choices[0].message.content: {str(data)[:200]}") from exc
    if not isinstance(content, str):
        raise MalformedResponse(f"message content is {type(content).__name__}, not text")
    return content


class HttpChatBackend:
    """Chat-completions backend with sync + async helpers and a retry budget."""

    def __init__(
        self,
        model: str,
        api_key: str | None,
        base_url: str = "https://openrouter.ai/api/v1",
        timeout: float = 30.0,
        max_retries: int = 3,
        backoff: float = 1.0,
        transport: httpx.BaseTransport | None = None,
        async_transport: httpx.AsyncBaseTransport | None = None,
    ) -> None:
        self.model = model
        self.api_key = api_key
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self.transport = transport
        self.async_transport = async_transport
        self.name = model

    def _headers(self) -> Dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def _payload(self, request: ChatRequest) -> Dict[str, Any]:
        return {
            "model": self.model,
            "messages": request.wire_messages(),
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }

    def _retry_kwargs(self) -> Dict[str, Any]:
        return {
            "stop": stop_after_attempt(self.max_retries + 1),
            "wait": wait_exponential(multiplier=self.backoff, min=0, max=60),
            "retry": retry_if_exception_type((httpx.TransportError, _RetryableStatus)),
            "before_sleep": _log_retry,
            "reraise": True,
        }

    def _check(self, response: httpx.Response) -> str:
        if response.status_code in AUTH_STATUS_CODES:
            raise AuthRejected(f"{self.base_url} rejected credentials (HTTP {response.status_code})")
        if response.status_code in RETRY_STATUS_CODES:
            raise _RetryableStatus(response.status_code, response.text)
        if response.status_code >= 400:
            raise TransportError(f"HTTP {response.status_code} from {self.base_url}: {response.text[:200]}")
        try:
            data = response.json()
        except ValueError as exc:
            raise MalformedResponse(f"response is not JSON: {response.text[:200]}") from exc
        return parse_chat_payload(data)

    def _exhausted(self, exc: Exception) -> Exception:
        if isinstance(exc, _RetryableStatus) and exc.status_code == 429:
            return RateLimited(f"rate limited after {self.max_retries} retries")
        return TransportError(f"{self.base_url} unreachable after {self.max_retries} retries: {exc}")

    def chat(self, request: ChatRequest) -> str:
        url = f"{self.base_url}/chat/completions"
        payload = self._payload(request)
        with traced_span("llm.chat", model=self.model, kind=request.kind):
            with httpx.Client(timeout=self.timeout, transport=self.transport) as client:
                try:
                    for attempt in Retrying(**self._retry_kwargs()):
                        with attempt:
                            response = client.post(url, headers=self._headers(), json=payload)
                            return self._check(response)
                except (httpx.TransportError, _RetryableStatus) as exc:
                    raise self._exhausted(exc) from exc
        raise TransportError("retry loop ended without a response")  # pragma: no cover

    async def achat(self, request: ChatRequest) -> str:
        url = f"{self.base_url}/chat/completions"
        payload = self._payload(request)
        with traced_span("llm.achat", model=self.model, kind=request.kind):
            async with httpx.AsyncClient(timeout=self.timeout, transport=self.async_transport) as client:
                try:
                    async for attempt in AsyncRetrying(**self._retry_kwargs()):
                        with attempt:
                            response = await client.post(url, headers=self._headers(), json=payload)
                            return self._check(response)
                except (httpx.TransportError, _RetryableStatus) as exc:
                    raise self._exhausted(exc) from exc
        raise TransportError("retry loop ended without a response")  # pragma: no cover
