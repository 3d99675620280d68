#!/usr/bin/env python3
"""
Cache mixin for memoising expensive pure graph computations
"""

from collections import OrderedDict
from typing import Any, Optional


class CacheMixin:
    """Mixin to add bounded memoisation with oldest-first eviction"""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._cache: "OrderedDict[str, Any]" = OrderedDict()
        self._maxEntries = 64

    def _getCacheKey(self, methodName: str, *args, **kwargs) -> str:
        """Generate cache key from method and arguments"""
        keyParts = [methodName]
        keyParts.extend(repr(arg) for arg in args)
        keyParts.extend(f"{k}={v!r}" for k, v in sorted(kwargs.items()))
        return "|".join(keyParts)

    def _evictOverflow(self):
        """Drop the oldest entries until the cache fits"""
        while len(self._cache) > self._maxEntries:
            self._cache.popitem(last=False)

    def _getCached(self, cacheKey: str) -> Optional[Any]:
        """Get cached value and mark it as recently used"""
        if cacheKey not in self._cache:
            return None
        self._cache.move_to_end(cacheKey)
        return self._cache[cacheKey]

    def _setCached(self, cacheKey: str, data: Any) -> None:
        """Store data and evict overflow"""
        self._cache[cacheKey] = data
        self._cache.move_to_end(cacheKey)
        self._evictOverflow()

    def _cachedCall(self, methodName: str, methodFunc, *args, **kwargs) -> Any:
        """Execute method with memoisation; size-guard failures are never cached"""
        cacheKey = self._getCacheKey(methodName, *args, **kwargs)

        cached = self._getCached(cacheKey)
        if cached is not None:
            return cached

        result = methodFunc(*args, **kwargs)
        if result is not None:
            self._setCached(cacheKey, result)
        return result

    def clearCache(self) -> None:
        """Forget every memoised result"""
        self._cache.clear()
