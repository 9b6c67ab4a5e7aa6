import pytest
from hypothesis import HealthCheck, settings

from oculus.fuzzy import FuzzyRuleBase, InferenceEngine
from oculus.fuzzy import backend as fuzzy_backend
from oculus.intent import IntentConfig

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def default_rulebase() -> FuzzyRuleBase:
    return IntentConfig.default().rulebase


@pytest.fixture(scope="session", params=fuzzy_backend.available_backends())
def backend_name(request) -> str:
    return request.param


@pytest.fixture(scope="session")
def engine(default_rulebase, backend_name) -> InferenceEngine:
    return InferenceEngine(default_rulebase, backend=backend_name)


@pytest.fixture(scope="session")
def default_config() -> IntentConfig:
    return IntentConfig.default()
