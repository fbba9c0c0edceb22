"""Test suite for the hetlink simulator."""
