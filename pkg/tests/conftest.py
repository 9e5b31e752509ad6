"""Shared test fixtures for the polytope toolkit tests."""

import random
import sys
from pathlib import Path

import pytest

# Add project root to path so imports work
sys.path.insert(0, str(Path(__file__).parent.parent))

from services.poset_core import FacePoset, build_poset  # noqa: E402


@pytest.fixture(autouse=True)
def tmp_data_dir(tmp_path, monkeypatch):
    """Redirect poset_io._DATA_DIR to a temp directory for every test."""
    import services.poset_io as pio

    monkeypatch.setattr(pio, "_DATA_DIR", tmp_path)
    pio._locks.clear()
    return tmp_path


def make_poset(ranks: list[int], covers: list[tuple[int, int]]) -> FacePoset:
    return build_poset(ranks, covers)


def make_two_triangles() -> FacePoset:
    """Two disjoint triangles sharing only a bottom and a top face."""
    ranks = [-1] + [0] * 6 + [1] * 6 + [2]
    covers = []
    for base in (0, 3):
        for i in range(3):
            v = 1 + base + i
            w = 1 + base + (i + 1) % 3
            e = 7 + base + i
            covers += [(v, 0), (e, v), (e, w), (13, e)]
    return build_poset(ranks, covers)


def relabel(poset: FacePoset, seed: int = 0) -> tuple[FacePoset, list[int]]:
    """Randomly renumber faces; returns (poset, old -> new)."""
    rng = random.Random(seed)
    perm = list(range(len(poset)))
    rng.shuffle(perm)
    ranks = [0] * len(poset)
    for old, new in enumerate(perm):
        ranks[new] = poset.ranks[old]
    covers = [(perm[u], perm[l]) for u, l in poset.covers]
    return build_poset(ranks, covers), perm
