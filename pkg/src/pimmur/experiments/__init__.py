"""Experiment harnesses; importing the package registers all five."""
from . import fake_news, herd, network_growth, social_balance, telephone  # noqa: F401
from .base import ExperimentResult, RunContext, registry

__all__ = ["ExperimentResult", "RunContext", "registry"]
