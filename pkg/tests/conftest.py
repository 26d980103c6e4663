import io
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from hmmtagger.evaluation import default_major_classes
from hmmtagger.lexicon import (
    ClassStore,
    default_lexicon_text,
    default_rules_text,
    load_guesser_rules,
    load_lexicon,
)
from hmmtagger.tagset import default_tagset


@pytest.fixture(scope="session")
def elwis():
    return default_tagset()


@pytest.fixture(scope="session")
def german_resources(elwis):
    """Bundled tag set, sample lexicon, guesser rules and their class store."""
    store = ClassStore()
    lex = load_lexicon(io.StringIO(default_lexicon_text()), elwis, store)
    rules = load_guesser_rules(io.StringIO(default_rules_text()), elwis, store)
    return elwis, store, lex, rules


@pytest.fixture(scope="session")
def elwis_major(elwis):
    return default_major_classes(elwis)
