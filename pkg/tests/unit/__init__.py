"""Unit tests for hsp-cli commands and services."""
