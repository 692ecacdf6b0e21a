import os
import time

import pytest

from whichslit.analysis.families import three_state
from whichslit.config import config
from whichslit.lab import WhichSlitLab
from whichslit.utils.cache import Cache


@pytest.fixture
def cache(tmp_path):
    return Cache(cache_dir=str(tmp_path / "cache"), enabled=True)


def test_set_and_get(cache):
    key = {"state": [1, 2], "options": {"seed": 0}}
    assert cache.get("solver", key) is None
    assert cache.set("solver", key, '{"found": false}')
    assert cache.get("solver", {"options": {"seed": 0}, "state": [1, 2]}) == '{"found": false}'
    assert cache.invalidate("solver", key)
    assert cache.get("solver", key) is None


def test_disabled_cache_is_inert(tmp_path):
    cache = Cache(cache_dir=str(tmp_path), enabled=False)
    assert not cache.set("solver", "key", "text")
    assert cache.get("solver", "key") is None
    assert not any(tmp_path.iterdir())


def test_disabled_by_default():
    assert Cache().enable_caching is False


def test_config_section_enables_cache(tmp_path):
    config.config["services"]["cache"]["enable_caching"] = True
    config.config["services"]["cache"]["cache_dir"] = str(tmp_path)
    cache = Cache()
    assert cache.enable_caching
    assert cache.cache_dir == tmp_path


def test_expired_entries_are_dropped(cache):
    cache.set("solver", "old", "text")
    path = next((cache.cache_dir / "solver").glob("*.json"))
    stale = time.time() - 40 * 24 * 3600
    os.utime(path, (stale, stale))
    assert cache.get("solver", "old") is None
    assert not path.exists()


def test_unknown_cache_type(cache):
    with pytest.raises(KeyError):
        cache.get("images", "key")


def test_clear(cache):
    cache.set("solver", "a", "1")
    cache.set("solver", "b", "2")
    assert cache.clear()
    assert cache.get("solver", "a") is None


def test_size_bound_evicts_oldest(cache):
    cache.max_cache_size_mb = 0.001
    cache.set("solver", "first", "x" * 800)
    first = next((cache.cache_dir / "solver").glob("*.json"))
    os.utime(first, (1, 1))
    cache.set("solver", "second", "y" * 800)
    assert cache.get("solver", "first") is None
    assert cache.get("solver", "second") == "y" * 800


def test_lab_search_reuses_cached_report(cache):
    lab = WhichSlitLab(cache=cache)
    psi = three_state()
    first = lab.search(psi, rank=3, restarts=4, seed=1)
    assert len(list((cache.cache_dir / "solver").glob("*.json"))) == 1
    second = lab.search(psi, rank=3, restarts=4, seed=1, workers=2)
    assert second.model_dump_json() == first.model_dump_json()
    lab.search(psi, rank=3, restarts=4, seed=2)
    assert len(list((cache.cache_dir / "solver").glob("*.json"))) == 2
