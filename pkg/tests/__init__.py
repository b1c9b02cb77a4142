"""Test suite for rf-uncertainty."""
