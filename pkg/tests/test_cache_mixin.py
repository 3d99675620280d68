#!/usr/bin/env python3
"""
Tests for CacheMixin core functionality
"""

import unittest
from unittest.mock import Mock

from percolation_locality.cache_mixin import CacheMixin
from percolation_locality.cayley import CayleyOracle, freeAbelian
from percolation_locality.errors import ResourceLimitError


class TestCacheMixin(unittest.TestCase):
    def setUp(self):
        self.cacheMixin = CacheMixin()
        self.cacheMixin._maxEntries = 3

    def testCacheKeyGeneration(self):
        """Test cache key generation with different arguments"""
        key1 = self.cacheMixin._getCacheKey("method", 4, None)
        key2 = self.cacheMixin._getCacheKey("method", 4, None)
        key3 = self.cacheMixin._getCacheKey("method", 5, None)

        self.assertEqual(key1, key2)
        self.assertNotEqual(key1, key3)

    def testCacheKeyWithKwargs(self):
        """Test cache key generation with keyword arguments"""
        key1 = self.cacheMixin._getCacheKey("method", r=2, vertexCap=10)
        key2 = self.cacheMixin._getCacheKey("method", vertexCap=10, r=2)
        key3 = self.cacheMixin._getCacheKey("method", r=2, vertexCap=11)

        self.assertEqual(key1, key2)  # Order shouldn't matter
        self.assertNotEqual(key1, key3)

    def testCacheSetAndGet(self):
        """Test basic cache set and get operations"""
        self.cacheMixin._setCached("key", {"ball": 13})
        self.assertEqual(self.cacheMixin._getCached("key"), {"ball": 13})
        self.assertIsNone(self.cacheMixin._getCached("missing"))

    def testCacheEviction(self):
        """Test oldest entries are dropped once the cache is full"""
        for i in range(4):
            self.cacheMixin._setCached(f"key{i}", i)

        self.assertIsNone(self.cacheMixin._getCached("key0"))
        self.assertEqual(self.cacheMixin._getCached("key3"), 3)
        self.assertEqual(len(self.cacheMixin._cache), 3)

    def testRecentlyUsedSurvivesEviction(self):
        """Test reading an entry protects it from the next eviction"""
        for i in range(3):
            self.cacheMixin._setCached(f"key{i}", i)
        self.cacheMixin._getCached("key0")
        self.cacheMixin._setCached("key3", 3)

        self.assertEqual(self.cacheMixin._getCached("key0"), 0)
        self.assertIsNone(self.cacheMixin._getCached("key1"))

    def testCachedCall(self):
        """Test the wrapped function runs once per argument set"""
        mockFunc = Mock(return_value="result")

        result1 = self.cacheMixin._cachedCall("method", mockFunc, "arg")
        result2 = self.cacheMixin._cachedCall("method", mockFunc, "arg")

        self.assertEqual(result1, "result")
        self.assertEqual(result2, "result")
        mockFunc.assert_called_once_with("arg")

    def testCachedCallSkipsNone(self):
        """Test None results are not memoised"""
        mockFunc = Mock(return_value=None)

        self.cacheMixin._cachedCall("method", mockFunc)
        self.cacheMixin._cachedCall("method", mockFunc)

        self.assertEqual(mockFunc.call_count, 2)

    def testResourceLimitNotCached(self):
        """Test size-guard failures propagate and leave nothing behind"""
        mockFunc = Mock(side_effect=ResourceLimitError("too big"))

        with self.assertRaises(ResourceLimitError):
            self.cacheMixin._cachedCall("method", mockFunc, 99)

        self.assertEqual(len(self.cacheMixin._cache), 0)

    def testRetryAfterResourceLimit(self):
        """Test a call that failed runs again and its later result is cached"""
        mockFunc = Mock(side_effect=[ResourceLimitError("too big"), 7])

        with self.assertRaises(ResourceLimitError):
            self.cacheMixin._cachedCall("method", mockFunc, 99)
        self.assertEqual(self.cacheMixin._cachedCall("method", mockFunc, 99), 7)
        self.assertEqual(self.cacheMixin._cachedCall("method", mockFunc, 99), 7)

        self.assertEqual(mockFunc.call_count, 2)

    def testClearCache(self):
        """Test cache clearing"""
        self.cacheMixin._setCached("key", 1)
        self.cacheMixin.clearCache()
        self.assertIsNone(self.cacheMixin._getCached("key"))


class TestOracleBallCache(unittest.TestCase):
    def testBallIsMemoised(self):
        """Test repeated getBall calls return the same object"""
        oracle = CayleyOracle(freeAbelian(2))
        self.assertIs(oracle.getBall(3), oracle.getBall(3))
        self.assertIsNot(oracle.getBall(3), oracle.getBall(2))

    def testCapFailureRetriesWithBiggerCap(self):
        """Test a capped failure does not poison a later uncapped call"""
        oracle = CayleyOracle(freeAbelian(2))
        with self.assertRaises(ResourceLimitError):
            oracle.getBall(5, vertexCap=10)
        self.assertEqual(oracle.getBall(5).numVertices(), 61)


if __name__ == "__main__":
    unittest.main()
