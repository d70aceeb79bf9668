"""Tests for HNRank."""
