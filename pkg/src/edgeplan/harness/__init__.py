"""Trace ingestion, synthetic workloads and experiment drivers."""
