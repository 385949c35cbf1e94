import pytest

from visotext.diacritics import strip_all_diacritics
from visotext.toy_corpus import load_toy
from visotext.trainer import TrainerConfig, UnigramTrainer


@pytest.fixture(scope="session")
def social():
    return load_toy("social")


@pytest.fixture(scope="session")
def news():
    return load_toy("news")


@pytest.fixture(scope="session")
def social_trainer(social):
    trainer = UnigramTrainer(TrainerConfig(target_vocab_size=1000, character_coverage=1.0))
    vocab = trainer.fit([c.text for c in social])
    return trainer, vocab


@pytest.fixture(scope="session")
def social_vocab(social_trainer):
    return social_trainer[1]


@pytest.fixture(scope="session")
def news_vocab(news):
    # General-text baseline: formal prose with diacritics stripped, no emoji.
    texts = [strip_all_diacritics(c.text) for c in news]
    return UnigramTrainer(TrainerConfig(target_vocab_size=1000, character_coverage=1.0)).fit(texts)


# One line per acceptance criterion, filled in by tests/test_acceptance.py.
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
