"""
Caches for oracle (quadrature) results, which are expensive compared to the closed forms.
"""
import hashlib
import logging
import os
import sqlite3
from abc import ABC, abstractmethod
from typing import Callable

import cloudpickle

from nlsignal.kronrod import QuadratureResult

logger = logging.getLogger(__name__)

CACHE_PATH_VARIABLE = "NLSIGNAL_CACHE_PATH"


def make_key(kind: str, *args) -> str:
    """
    Cache key for an oracle call: the sha256 digest of the cloudpickled arguments. Detector
    pairs and densities are frozen dataclasses, so equal configurations share a key.
    """
    return hashlib.sha256(cloudpickle.dumps((kind, args))).hexdigest()


class OracleCache(ABC):
    """
    Interface of an oracle-result store.

    ::

        cache = MemoryOracleCache()
        oracle = cached(integrate_s2_nonlocal, cache)
        oracle(pair, sd, 1e-10)  # integrates
        oracle(pair, sd, 1e-10)  # served from the cache
    """

    def __getitem__(self, key: str) -> QuadratureResult:
        return self.get(key)

    def __setitem__(self, key: str, item: QuadratureResult):
        self.set(key, item)

    def __contains__(self, key: str) -> bool:
        return self.contains(key)

    @abstractmethod
    def get(self, key: str) -> QuadratureResult:
        """
        :raise KeyError: when the key is not in the cache.
        """

    @abstractmethod
    def set(self, key: str, item: QuadratureResult) -> None:
        """Stores ``item`` under ``key``, replacing any previous entry."""

    def contains(self, key: str) -> bool:
        """Checks whether a key is already in the cache."""
        try:
            self.get(key)
            return True
        except KeyError:
            return False


class MemoryOracleCache(OracleCache):
    """
    An in-memory cache backed by a dictionary.
    """

    def __init__(self, initial_cache: dict = None):
        self._cache = initial_cache or {}

    def __str__(self):
        return f"Memory cache with {len(self._cache)} entries"

    def get(self, key: str) -> QuadratureResult:
        return self._cache[key]

    def set(self, key: str, item: QuadratureResult) -> None:
        self._cache[key] = item


class FileSystemOracleCache(OracleCache):
    """
    A sqlite-backed cache. Values are cloudpickled into a BLOB column, so the database file is
    the whole cache and may be shared by worker processes.
    """

    def __init__(self, filepath: str = None, table_name: str = "oracle"):
        """
        :param filepath: database file; defaults to ``$NLSIGNAL_CACHE_PATH`` and then to
            ``nlsignal.sqlite`` in the working directory.
        """
        self._filepath = os.path.abspath(
            filepath or os.environ.get(CACHE_PATH_VARIABLE) or "nlsignal.sqlite"
        )
        self._table_name = table_name
        self._sql_select = f"SELECT value FROM {table_name} WHERE key = ?"
        self._sql_insert = f"INSERT OR REPLACE INTO {table_name}(key,value) VALUES(?,?)"
        self._setup_database()

    @property
    def filepath(self) -> str:
        """Location of the database file."""
        return self._filepath

    def _connect(self) -> sqlite3.Connection:
        return sqlite3.connect(self._filepath, isolation_level="DEFERRED", timeout=10)

    def _setup_database(self) -> None:
        with self._connect() as database:
            database.execute(
                f"""
                CREATE TABLE IF NOT EXISTS {self._table_name} (
                    key TEXT PRIMARY KEY,
                    ts REAL NOT NULL DEFAULT ((julianday('now') - 2440587.5)*86400.0),
                    value BLOB NOT NULL
                ) WITHOUT ROWID
            """
            )

    def __str__(self) -> str:
        return f"Filesystem cache, using {self._filepath}"

    def get(self, key: str) -> QuadratureResult:
        with self._connect() as database:
            rows = database.execute(self._sql_select, (key,)).fetchall()
        if not rows:
            raise KeyError(f"Key '{key}' not in cache")
        return cloudpickle.loads(rows[0][0])

    def set(self, key: str, item: QuadratureResult) -> None:
        with self._connect() as database:
            database.execute(self._sql_insert, (key, cloudpickle.dumps(item)))


def cached(oracle: Callable[..., QuadratureResult], cache: OracleCache) -> Callable:
    """
    Wraps an oracle function so results are looked up in ``cache`` before integrating.
    """

    def wrapped(*args) -> QuadratureResult:
        key = make_key(oracle.__name__, *args)
        try:
            result = cache.get(key)
            logger.debug("cache hit for %s", oracle.__name__)
            return result
        except KeyError:
            result = oracle(*args)
            cache.set(key, result)
            return result

    wrapped.__name__ = getattr(oracle, "__name__", "oracle")
    return wrapped
