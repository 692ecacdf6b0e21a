"""
Caching module for whichslit.
Stores JSON artifacts (solver reports) keyed on a digest of the request that produced them.
"""

import hashlib
import json
import logging
import os
import time
from pathlib import Path
from typing import Any, Optional

from whichslit.config import config

logger = logging.getLogger(__name__)

CACHE_TYPES = ("solver",)


class Cache:
    """File cache for JSON artifacts."""

    def __init__(self, cache_dir: Optional[str] = None, enabled: Optional[bool] = None):
        """
        Initialize the cache manager.

        Args:
            cache_dir: Directory to store cache files. If None, uses the configured
                directory or ``~/.whichslit/cache``.
            enabled: Force caching on or off; the ``cache`` config section decides when None.
        """
        cache_config = config.get_service_config("cache")

        if cache_dir:
            self.cache_dir = Path(cache_dir)
        elif cache_config.get("cache_dir"):
            self.cache_dir = Path(cache_config["cache_dir"])
        else:
            self.cache_dir = Path.home() / ".whichslit" / "cache"

        self.enable_caching = bool(cache_config.get("enable_caching", False) if enabled is None else enabled)
        self.max_cache_size_mb = float(cache_config.get("max_cache_size_mb", 200))
        self.cache_expiry_days = float(cache_config.get("cache_expiry_days", 30))

    @staticmethod
    def _get_cache_key(key_data: Any) -> str:
        """
        Generate a cache key from the input data.

        Dicts and lists are serialized with sorted keys so equal requests share a key.
        """
        if isinstance(key_data, (dict, list, tuple)):
            key_str = json.dumps(key_data, sort_keys=True, default=str)
        else:
            key_str = str(key_data)
        return hashlib.md5(key_str.encode("utf-8")).hexdigest()

    def _get_cache_path(self, cache_type: str, cache_key: str) -> Path:
        if cache_type not in CACHE_TYPES:
            raise KeyError(f"Unknown cache type: {cache_type}")
        return self.cache_dir / cache_type / f"{cache_key}.json"

    def get(self, cache_type: str, key_data: Any) -> Optional[str]:
        """
        Get cached JSON text.

        Returns:
            The cached text if present and not expired, None otherwise.
        """
        if not self.enable_caching:
            return None

        cache_path = self._get_cache_path(cache_type, self._get_cache_key(key_data))
        if not cache_path.exists():
            return None

        cache_age_days = (time.time() - cache_path.stat().st_mtime) / (60 * 60 * 24)
        if cache_age_days > self.cache_expiry_days:
            cache_path.unlink()
            return None

        try:
            return cache_path.read_text(encoding="utf-8")
        except OSError as e:
            logger.warning("Error loading cache entry %s: %s", cache_path, e)
            return None

    def set(self, cache_type: str, key_data: Any, text: str) -> bool:
        """
        Cache JSON text.

        Returns:
            True if the text was written, False otherwise.
        """
        if not self.enable_caching:
            return False

        cache_path = self._get_cache_path(cache_type, self._get_cache_key(key_data))
        try:
            cache_path.parent.mkdir(parents=True, exist_ok=True)
            cache_path.write_text(text, encoding="utf-8")
        except OSError as e:
            logger.warning("Error caching data at %s: %s", cache_path, e)
            return False
        self._cleanup_cache_if_needed()
        return True

    def invalidate(self, cache_type: str, key_data: Any) -> bool:
        if not self.enable_caching:
            return False
        cache_path = self._get_cache_path(cache_type, self._get_cache_key(key_data))
        if not cache_path.exists():
            return False
        cache_path.unlink()
        return True

    def clear(self, cache_type: Optional[str] = None) -> bool:
        """
        Clear the cache.

        Args:
            cache_type: Type of cached content to clear. If None, clears all types.
        """
        if not self.enable_caching:
            return False
        for name in (cache_type,) if cache_type else CACHE_TYPES:
            directory = self.cache_dir / name
            if directory.exists():
                for file in directory.glob("*.json"):
                    file.unlink()
        return True

    def _get_cache_size(self) -> int:
        """Total size of the cache in bytes."""
        total_size = 0
        for dirpath, _, filenames in os.walk(self.cache_dir):
            for filename in filenames:
                total_size += (Path(dirpath) / filename).stat().st_size
        return total_size

    def _cleanup_cache_if_needed(self):
        """Drop the oldest entries once the cache exceeds its size bound, down to 80%."""
        if self._get_cache_size() / (1024 * 1024) <= self.max_cache_size_mb:
            return

        cache_files = []
        for dirpath, _, filenames in os.walk(self.cache_dir):
            for filename in filenames:
                file_path = Path(dirpath) / filename
                cache_files.append((file_path, file_path.stat().st_mtime))
        cache_files.sort(key=lambda item: item[1])

        for file_path, _ in cache_files:
            file_path.unlink()
            if self._get_cache_size() / (1024 * 1024) <= self.max_cache_size_mb * 0.8:
                break
