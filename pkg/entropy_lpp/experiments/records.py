"""Per-replica experiment records and the report that gathers them."""

from dataclasses import dataclass, field
import logging
from typing import Any, Optional

from entropy_lpp.environment import GENERATOR_ID, SeedSpec
from entropy_lpp.errors import ExperimentCheckError
from entropy_lpp.experiments.stats import SummaryStats

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentRecord:
    """Outputs of one replica, with everything needed to recompute them."""

    experiment: str
    params: dict
    seed: SeedSpec
    outputs: dict
    generator_id: str = GENERATOR_ID

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "params": dict(self.params),
            "seed": self.seed.to_dict(),
            "outputs": dict(self.outputs),
            "generator_id": self.generator_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentRecord":
        return cls(
            experiment=data["experiment"],
            params=dict(data["params"]),
            seed=SeedSpec.from_dict(data["seed"]),
            outputs=dict(data["outputs"]),
            generator_id=data.get("generator_id", GENERATOR_ID),
        )


@dataclass
class ExperimentReport:
    """Records, summaries and pass/fail checks of one experiment run.

    ``summaries`` maps a label to the :class:`SummaryStats` of one sample;
    ``extras`` holds scalar or list outputs such as tail curves.
    """

    experiment: str
    params: dict
    master_seed: int
    records: list[ExperimentRecord] = field(default_factory=list)
    summaries: dict[str, SummaryStats] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    strict: bool = False

    def check(self, name: str, passed: bool, detail: Optional[str] = None):
        passed = bool(passed)
        self.checks[name] = passed
        if not passed:
            message = f"{self.experiment}: check '{name}' failed"
            if detail:
                message = f"{message} ({detail})"
            logger.warning(message)
            if self.strict:
                raise ExperimentCheckError(message)
        return passed

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def summary_rows(self) -> list[dict]:
        return [s.to_row(label) for label, s in self.summaries.items()]

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "params": dict(self.params),
            "master_seed": self.master_seed,
            "summaries": {
                label: s.to_row(label) for label, s in self.summaries.items()
            },
            "extras": dict(self.extras),
            "checks": dict(self.checks),
        }
