"""Shared fixtures: shipped rules and the seed table."""

from typing import List, Tuple

import pytest

from core.config_manager import DEFAULT_RULES_PATH
from core.perturbation import SeedSentence
from core.span_attributes import ComplianceRules, Lexicon, load_rules
from helpers import table_seeds


@pytest.fixture(scope="session")
def es_rules() -> Tuple[ComplianceRules, Lexicon]:
    return load_rules(DEFAULT_RULES_PATH)


@pytest.fixture(scope="session")
def rules(es_rules) -> ComplianceRules:
    return es_rules[0]


@pytest.fixture(scope="session")
def lexicon(es_rules) -> Lexicon:
    return es_rules[1]


@pytest.fixture
def seeds() -> List[SeedSentence]:
    return table_seeds()
