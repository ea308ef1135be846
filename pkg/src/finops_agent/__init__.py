"""Federated FinOps data gateway, NL2GraphQL translation, agent pipeline, and eval harness."""

__version__ = "0.1.0"
