import pytest

from gectag.morphology import default_noun_exceptions, default_verb_dictionary

WORKED_SOURCE = "A ten years old boy go school".split()
WORKED_TARGET = "A ten-year-old boy goes to school .".split()


@pytest.fixture(scope="session")
def verbs():
    return default_verb_dictionary()


@pytest.fixture(scope="session")
def nouns():
    return default_noun_exceptions()
