"""Replica experiments, their records and summary statistics.

Submodules are imported directly (``entropy_lpp.experiments.harness`` and
so on) so that ``entropy_lpp.volume`` can use the statistics helpers
without pulling in the solvers.
"""
