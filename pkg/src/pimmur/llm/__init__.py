"""Chat and embedding backend exports."""

from .embeddings import DeterministicOracle, HttpEmbedder
from .http_client import HttpChatBackend
from .scripted import ScriptedBackend, ScriptedRule

__all__ = ["DeterministicOracle", "HttpChatBackend", "HttpEmbedder", "ScriptedBackend", "ScriptedRule"]
