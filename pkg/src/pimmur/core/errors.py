"""Exception hierarchy shared by every pimmur subpackage."""
from __future__ import annotations


class PimmurError(Exception):
    """Base class for all library errors."""


# configuration


class ConfigError(PimmurError):
    """The run configuration cannot be turned into a SimConfig."""


class UnknownExperiment(ConfigError):
    pass


class TopologyMismatch(ConfigError):
    pass


class NonPositiveCount(ConfigError):
    pass


class MissingBackend(ConfigError):
    pass


class InvalidConfig(ConfigError):
    pass


# backends


class BackendError(PimmurError):
    """A text-generation or embedding provider failed."""


class TransportError(BackendError):
    pass


class AuthRejected(BackendError):
    pass


class MalformedResponse(BackendError):
    pass


class RateLimited(BackendError):
    pass


class EmptyText(BackendError):
    pass


class ScriptError(BackendError):
    """A scripted backend was built from an unusable rule list."""


class UnparseableAnswer(PimmurError):
    def __init__(self, response: str, choices: list[str]) -> None:
        super().__init__(f"no admissible answer among {choices} in response {response[-120:]!r}")
        self.response = response
        self.choices = choices


# memory


class MemoryStoreError(PimmurError):
    pass


class RoundRegression(MemoryStoreError):
    pass


class EmptySentence(MemoryStoreError):
    pass


class ReflectionScheduleError(MemoryStoreError):
    pass


# engine


class TooFewAgents(PimmurError):
    pass


class SteeringLeak(PimmurError):
    """An assembled prompt contains a phrase from the active deny-list."""


class RoundAborted(PimmurError):
    def __init__(self, round: int, agent_id: str, cause: BaseException) -> None:
        super().__init__(f"round {round} aborted at {agent_id}: {cause}")
        self.round = round
        self.agent_id = agent_id
        self.cause = cause


# metrics


class MetricError(PimmurError):
    pass


class DimensionMismatch(MetricError):
    pass


class ZeroVector(MetricError):
    pass


class AllZero(MetricError):
    pass


class TooFewPoints(MetricError):
    pass


# audit and cli


class MalformedCorpus(PimmurError):
    pass


class RunDirectoryExists(PimmurError):
    pass


class MissingArtifact(PimmurError):
    """A run directory lacks a file the report needs."""
