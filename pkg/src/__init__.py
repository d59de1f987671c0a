"""Pareto-optimal co-allocation of real-time tasks, memory-bandwidth and cache partitions."""

__version__ = "0.1.0"
