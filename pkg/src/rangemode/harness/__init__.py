"""Oracles, traces, replay, fuzz verification and benchmarking."""
