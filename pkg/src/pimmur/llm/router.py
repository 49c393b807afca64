"""Build chat backends and embedders from descriptors."""
from __future__ import annotations

import os

from ..core.config import BackendDescriptor, EmbedderDescriptor
from ..core.errors import MissingBackend
from ..infra.config import Settings
from .base import ChatBackend, Embedder
from .embeddings import DeterministicOracle, HttpEmbedder
from .http_client import HttpChatBackend
from .scripted import ScriptedBackend
from .scripts import load_script

SCRIPTED_PREFIX = "scripted:"


def _api_key(env_name: str | None, settings: Settings) -> str | None:
    if env_name:
        return os.environ.get(env_name) or settings.api_key
    return settings.api_key


def build_backend(descriptor: BackendDescriptor, settings: Settings, seed: int = 0) -> ChatBackend:
    if descriptor.kind == "scripted":
        if not descriptor.script_id:
            raise MissingBackend("scripted backend needs a script_id")
        return ScriptedBackend(load_script(descriptor.script_id), seed=seed, name=f"{SCRIPTED_PREFIX}{descriptor.script_id}")
    if not descriptor.model:
        raise MissingBackend("http backend needs a model")
    return HttpChatBackend(
        model=descriptor.model,
        api_key=_api_key(descriptor.api_key_env, settings),
        base_url=descriptor.base_url or settings.base_url,
        timeout=settings.request_timeout,
        max_retries=settings.max_retries,
        backoff=settings.retry_backoff,
    )


def backend_from_model(model: str, settings: Settings, seed: int = 0) -> ChatBackend:
    """``scripted:<id>`` selects a script; anything else is a remote model name."""

    if model.startswith(SCRIPTED_PREFIX):
        return build_backend(BackendDescriptor(kind="scripted", script_id=model[len(SCRIPTED_PREFIX):]), settings, seed)
    return build_backend(BackendDescriptor(kind="http", model=model), settings, seed)


def build_embedder(descriptor: EmbedderDescriptor, settings: Settings) -> Embedder:
    if descriptor.kind == "oracle":
        return DeterministicOracle(dimension=descriptor.dimension)
    return HttpEmbedder(
        model=descriptor.model or settings.embedding_model,
        api_key=_api_key(descriptor.api_key_env, settings),
        base_url=descriptor.base_url or settings.base_url,
        timeout=settings.request_timeout,
        max_retries=settings.max_retries,
        backoff=settings.retry_backoff,
    )
