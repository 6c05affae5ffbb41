"""Tests for rd-lab."""
