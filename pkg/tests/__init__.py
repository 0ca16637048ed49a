"""Tests for cross-section package."""
