"""Oracle-equivalence, duality and volume suites behind ``elpp selftest``.

``quick`` runs every suite at a reduced instance count; the full run uses
the acceptance sizes.
"""

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from entropy_lpp.core import Box, CONTINUOUS, LATTICE
from entropy_lpp.environment import (
    Environment,
    SeedSpec,
    derive_stream,
    sample_lattice_cloud,
    sample_uniform_cloud,
)
from entropy_lpp.experiments.runner import stream_for
from entropy_lpp.solvers.elpp import (
    brute_force_elpp,
    build_frontier,
    elpp_value,
)
from entropy_lpp.solvers.variational import (
    brute_force_variational,
    solve_variational,
)
from entropy_lpp.volume import volume_mc

logger = logging.getLogger(__name__)

VARIATIONAL_TOLERANCE = 1e-9


@dataclass
class SelftestReport:
    quick: bool
    master_seed: int
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "quick": self.quick,
            "master_seed": self.master_seed,
            "passed": self.passed,
            "checks": dict(self.checks),
            "details": dict(self.details),
        }


def _clouds(count: int, m: int, master_seed: int, role: int):
    continuous = Box(CONTINUOUS, 1.0, 1.0)
    lattice = Box(LATTICE, 6, 3)
    for r in range(count):
        seed = SeedSpec(master_seed, stream_for(r, role))
        if r % 2:
            yield sample_lattice_cloud(m, lattice, seed)
        else:
            yield sample_uniform_cloud(m, continuous, seed)


def _elpp_oracle(report: SelftestReport, instances: int) -> None:
    mismatches = 0
    for env in _clouds(instances, 12, report.master_seed, role=0):
        for budget in (0.1, 1.0, 10.0):
            if elpp_value(env, budget).value != brute_force_elpp(env, budget):
                mismatches += 1
    report.details["elpp_mismatches"] = mismatches
    report.checks["elpp_oracle"] = mismatches == 0


def _variational_oracle(report: SelftestReport, instances: int) -> None:
    mismatches = 0
    for r in range(instances):
        env = sample_uniform_cloud(
            10, Box(CONTINUOUS, 1.0, 1.0),
            SeedSpec(report.master_seed, stream_for(r, 1)),
        )
        # unit weights make ties likely, so draw Pareto ones
        rng = derive_stream(SeedSpec(report.master_seed, stream_for(r, 4)))
        weights = np.sort((1.0 - rng.random(len(env))) ** -1.0)[::-1]
        env = Environment(
            box=env.box, weights=weights, t=env.t, x=env.x, kind=env.kind,
            seed=env.seed, alpha=1.0,
        )
        for beta in (0.5, 2.0, 8.0):
            result = solve_variational(env, beta, 10)
            value, ids = brute_force_variational(env, beta, 10)
            if (
                abs(result.value - value) > VARIATIONAL_TOLERANCE
                or result.indices != ids
            ):
                mismatches += 1
    report.details["variational_mismatches"] = mismatches
    report.checks["variational_oracle"] = mismatches == 0


def _duality(report: SelftestReport, instances: int) -> None:
    failures = 0
    budgets = np.linspace(0.05, 3.0, 20)
    for env in _clouds(instances, 20, report.master_seed, role=2):
        frontier = build_frontier(env)
        for budget in budgets:
            value = elpp_value(env, float(budget)).value
            for k in range(1, 21):
                feasible = frontier.best_for_count(k)[0] <= budget
                if feasible != (value >= k):
                    failures += 1
    report.details["duality_failures"] = failures
    report.checks["duality"] = failures == 0


def _volume(report: SelftestReport, samples: int) -> None:
    deviations = {}
    for k in (1, 2, 3, 4):
        estimate = volume_mc(
            k, 1.0, 1.0, samples, SeedSpec(report.master_seed, stream_for(k, 3))
        )
        deviations[k] = estimate.deviation
    report.details["volume_deviation"] = deviations
    report.checks["volume"] = all(
        math.isfinite(d) and d <= 3.0 for d in deviations.values()
    )


def run_selftest(quick: bool = True, master_seed: int = 0) -> SelftestReport:
    """Run the suites and return their report."""
    report = SelftestReport(quick=quick, master_seed=master_seed)
    instances = 50 if quick else 1000
    _elpp_oracle(report, instances)
    _variational_oracle(report, instances)
    _duality(report, 10 if quick else 100)
    _volume(report, 100_000 if quick else 1_000_000)
    for name, passed in report.checks.items():
        log = logger.info if passed else logger.error
        log("selftest %s: %s", name, "passed" if passed else "FAILED")
    return report
