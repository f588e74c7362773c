import os
from unittest.mock import Mock

import pytest

from nlsignal.caching import (
    CACHE_PATH_VARIABLE,
    FileSystemOracleCache,
    MemoryOracleCache,
    OracleCache,
    cached,
    make_key,
)
from nlsignal.detectors import lightband_delta
from nlsignal.field import SpectralDensity
from nlsignal.kronrod import QuadratureResult
from nlsignal.parallel import TaskManager, delayed

RESULT = QuadratureResult(1.25e-3, 4e-14, 315, 0.0)


def mock_oracle(result=RESULT) -> Mock:
    oracle = Mock(return_value=result)
    oracle.__name__ = "oracle"
    return oracle


class TestMakeKey:
    def test_equal_configurations_share_a_key(self):
        first = make_key("s2", lightband_delta(1.0, 7.0, 2.0, 8.0), SpectralDensity(0.01))
        second = make_key("s2", lightband_delta(1.0, 7.0, 2.0, 8.0), SpectralDensity(0.01))
        assert first == second

    def test_key_depends_on_arguments(self):
        pair = lightband_delta(1.0, 7.0, 2.0, 8.0)
        assert make_key("s2", pair, SpectralDensity(0.01)) != make_key(
            "s2", pair, SpectralDensity(0.02)
        )

    def test_key_depends_on_kind(self):
        assert make_key("local", 1.0) != make_key("nonlocal", 1.0)

    def test_key_is_hex_digest(self):
        key = make_key("s2", 1.0)
        assert len(key) == 64
        int(key, 16)


class TestMemoryOracleCache:
    def test_get_works_when_data_in_cache(self):
        cache = MemoryOracleCache({"key": RESULT})
        assert cache.get("key") == RESULT
        assert cache["key"] == RESULT

    def test_set_works(self):
        cache = MemoryOracleCache()
        cache["key"] = RESULT
        assert cache.get("key") == RESULT

    def test_contains_works(self):
        cache = MemoryOracleCache({"key": RESULT})
        assert "key" in cache
        assert cache.contains("not_in_cache") is False

    def test_raises_key_error_when_key_not_in_cache(self):
        with pytest.raises(KeyError):
            MemoryOracleCache().get("not_in_cache")


class TestFileSystemOracleCache:
    def test_sets_then_gets(self, tmp_path):
        cache = FileSystemOracleCache(str(tmp_path / "oracle.sqlite"))
        cache.set("first", RESULT)
        cache.set("second", RESULT.scaled(2.0))
        cache.set("first", RESULT.scaled(3.0))

        assert cache.get("first").value == pytest.approx(3 * RESULT.value)
        assert cache.get("second").value == pytest.approx(2 * RESULT.value)

    def test_raises_key_error_when_key_not_in_cache(self, tmp_path):
        cache = FileSystemOracleCache(str(tmp_path / "oracle.sqlite"))
        with pytest.raises(KeyError):
            cache.get("not_in_cache")
        assert "not_in_cache" not in cache

    def test_persists_across_instances(self, tmp_path):
        path = str(tmp_path / "oracle.sqlite")
        FileSystemOracleCache(path).set("key", RESULT)
        assert FileSystemOracleCache(path).get("key") == RESULT

    def test_path_from_environment(self, tmp_path, monkeypatch):
        path = tmp_path / "from_env.sqlite"
        monkeypatch.setenv(CACHE_PATH_VARIABLE, str(path))
        cache = FileSystemOracleCache()
        assert cache.filepath == os.path.abspath(str(path))
        assert path.exists()

    def test_explicit_path_wins_over_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv(CACHE_PATH_VARIABLE, str(tmp_path / "from_env.sqlite"))
        cache = FileSystemOracleCache(str(tmp_path / "explicit.sqlite"))
        assert cache.filepath.endswith("explicit.sqlite")


class TestCached:
    def test_calls_oracle_when_not_in_cache(self):
        oracle = mock_oracle()
        assert cached(oracle, MemoryOracleCache())(1.0, 2.0) == RESULT
        oracle.assert_called_once_with(1.0, 2.0)

    def test_does_not_call_oracle_when_cached(self):
        oracle = mock_oracle()
        wrapped = cached(oracle, MemoryOracleCache())
        wrapped(1.0)
        wrapped(1.0)
        assert oracle.call_count == 1

    def test_stores_result_under_key(self):
        cache = Mock(spec_set=OracleCache)
        cache.get.side_effect = KeyError()
        cached(mock_oracle(), cache)(1.0)
        cache.set.assert_called_once_with(make_key("oracle", 1.0), RESULT)

    def test_keeps_name(self):
        assert cached(mock_oracle(), MemoryOracleCache()).__name__ == "oracle"

    @pytest.mark.slow
    def test_file_system_cache_works_in_parallel(self, tmp_path):
        cache = FileSystemOracleCache(str(tmp_path / "oracle.sqlite"))

        def oracle(a, b):
            return QuadratureResult(a + b, 0.0, 1, 0.0)

        wrapped = cached(oracle, cache)
        manager = TaskManager(workers=2)
        manager.add_tasks(delayed(wrapped)(1.0, 1.0) for _ in range(10))

        assert [result.value for result in manager.run()] == [2.0] * 10
