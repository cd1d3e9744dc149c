"""Best-arm identification with possibly biased offline data (LUCB-H)."""

__version__ = "0.1.0"
