"""Test suite for hsp-cli."""
