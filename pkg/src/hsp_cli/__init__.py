"""hsp-cli - simulator and verifier for hidden subgroup algorithms."""

__version__ = "0.1.0"
