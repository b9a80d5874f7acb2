"""Lifelong-learning crafting agent with a deterministic simulator backend."""

__version__ = "0.1.0"
