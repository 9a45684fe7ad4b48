import pytest

from h2blackstart.adapters.repository import BundledScenarioRepository
from h2blackstart.domain.constants import Strategy, TriggerMode
from h2blackstart.service_layer import services


@pytest.fixture(scope="session")
def paper_case():
    return BundledScenarioRepository().get("paper-case")


@pytest.fixture(scope="session")
def paper_sizing(paper_case):
    return services.size(paper_case)


@pytest.fixture(scope="session")
def whcc_run(paper_case):
    return services.blackstart(paper_case, Strategy.WHCC)


@pytest.fixture(scope="session")
def hscc_run(paper_case):
    return services.blackstart(paper_case, Strategy.HSCC)


@pytest.fixture(scope="session")
def whcc_scripted_run(paper_case):
    return services.blackstart(paper_case, Strategy.WHCC, trigger_mode=TriggerMode.SCRIPTED)


@pytest.fixture(scope="session")
def hscc_scripted_run(paper_case):
    return services.blackstart(paper_case, Strategy.HSCC, trigger_mode=TriggerMode.SCRIPTED)
