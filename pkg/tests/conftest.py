from __future__ import annotations

import pytest

from stlkit.knowledge import KnowledgeStore
from stlkit.pairs import NLSTLPair, load_bundled_seeds


@pytest.fixture(scope="session")
def bundled_pairs() -> list[NLSTLPair]:
    return load_bundled_seeds()


@pytest.fixture(scope="session")
def seed_store(bundled_pairs) -> KnowledgeStore:
    return KnowledgeStore(bundled_pairs)


@pytest.fixture()
def toy_pairs() -> list[NLSTLPair]:
    return [
        NLSTLPair("t1", "the robot arm lifts the crate", "G[0,5] ( lift > 0 )"),
        NLSTLPair("t2", "the drone hovers above the pad", "F[0,9] ( hover > 1 )"),
        NLSTLPair("t3", "the oven cools below threshold", "F[2,8] ( heat < 3 )"),
    ]
