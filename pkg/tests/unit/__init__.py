"""
Unit tests for kernels, solvers, simulators and the CLI layer.
"""
