"""Replica experiments over the solvers.

Every experiment draws its replicas from disjoint seed streams
(``stream_for(replica, role)``), runs them through a :class:`ReplicaRunner`
and gathers an :class:`ExperimentReport`. Summaries are computed from the
emitted records only. Statistical checks are recorded in ``report.checks``;
a failed check is logged, and raises in strict mode.
"""

from functools import partial
import logging
import math
from typing import Optional, Sequence

import arrow
import numpy as np

from entropy_lpp.config import current_config
from entropy_lpp.core import Box, CONTINUOUS, LATTICE
from entropy_lpp.environment import (
    SeedSpec,
    beta_for_nu,
    m_of,
    sample_lattice_cloud,
    sample_lattice_field,
    sample_ppp_ordered,
    sample_uniform_cloud,
)
from entropy_lpp.errors import InvalidParameterError
from entropy_lpp.experiments.records import ExperimentRecord, ExperimentReport
from entropy_lpp.experiments.runner import ReplicaRunner, stream_for
from entropy_lpp.experiments.stats import (
    SummaryStats,
    binomial_stderr,
    decay_onset,
    decays_supergeometrically,
    empirical_tail,
    ks_two_sample,
    tail_slope,
)
from entropy_lpp.solvers.elpp import elpp_value, scale_of, tail_bound
from entropy_lpp.solvers.variational import (
    continuum_T_truncated,
    solve_tail,
    solve_variational,
)

logger = logging.getLogger(__name__)

TAIL_MIN_REPLICAS = 1000
SCALING_MIN_ELL = 100
SCALING_MIN_Q = 8
SCALING_MIN_REPLICAS = 2000
SLOPE_SLACK = 0.1
MIN_LADDER = 3


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidParameterError(message)


def _check_alpha(alpha: float) -> None:
    _require(0 < alpha < 2, f"alpha must lie in (0, 2), got {alpha}")


def _log_done(name: str, started: arrow.Arrow, replicas: int) -> None:
    elapsed = arrow.utcnow() - started
    logger.info(
        "%s finished %d replicas in %.1fs",
        name,
        replicas,
        elapsed.total_seconds(),
    )


# workers: module level so the process pool can pickle them


def _tail_worker(task: tuple) -> dict:
    m, budget, box_dict, master, stream = task
    box = Box(**box_dict)
    seed = SeedSpec(master, stream)
    if box.is_lattice:
        env = sample_lattice_cloud(m, box, seed)
    else:
        env = sample_uniform_cloud(m, box, seed)
    result = elpp_value(env, budget)
    return {
        "value": result.value,
        "witness_entropy": result.entropy_of_witness,
    }


def _continuum_worker(task: tuple) -> float:
    alpha, nu, q, ell, master, stream = task
    return continuum_T_truncated(
        alpha, nu, q, ell, SeedSpec(master, stream)
    ).value


def _lattice_box(n: int, h: float, q: float) -> Box:
    return Box(LATTICE, int(n), int(math.floor(q * h)))


def _lattice_worker(task: tuple) -> float:
    alpha, beta, n, h, q, ell, master, stream = task
    env = sample_lattice_field(
        _lattice_box(n, h, q), alpha, SeedSpec(master, stream), top_k=ell
    )
    return solve_variational(env, beta, ell).value * n / (h * h)


def _truncation_lattice_worker(task: tuple) -> dict:
    alpha, beta, n, h, q, ells, top_k, master, stream = task
    env = sample_lattice_field(
        _lattice_box(n, h, q), alpha, SeedSpec(master, stream), top_k=top_k
    )
    size = len(env)
    return {
        "tail": [
            solve_tail(env, beta, ell).value if ell < size else 0.0
            for ell in ells
        ],
        "head": [
            solve_variational(env, beta, min(ell, size)).value for ell in ells
        ],
    }


def _truncation_continuum_worker(task: tuple) -> dict:
    alpha, nu, q, ells, master, stream = task
    env = sample_ppp_ordered(2 * max(ells), alpha, q, SeedSpec(master, stream))
    head = [solve_variational(env, nu, ell).value for ell in ells]
    doubled = [solve_variational(env, nu, 2 * ell).value for ell in ells]
    return {
        "head": head,
        "increment": [b - a for a, b in zip(head, doubled)],
    }


def _continuum_sample(
    runner: ReplicaRunner,
    alpha: float,
    nu: float,
    q: float,
    ell: int,
    replicas: int,
    master_seed: int,
    role: int,
) -> tuple[list[float], list[SeedSpec]]:
    seeds = [
        SeedSpec(master_seed, stream_for(r, role)) for r in range(replicas)
    ]
    values = runner.map(
        _continuum_worker,
        [
            (alpha, nu, q, ell, s.master_seed, s.stream_index)
            for s in seeds
        ],
    )
    return values, seeds


def run_tail_experiment(
    m: int,
    budget: float,
    replicas: int,
    master_seed: int,
    t: Optional[float] = None,
    x: Optional[float] = None,
    n: Optional[int] = None,
    h: Optional[int] = None,
    c0: Optional[float] = None,
    threads: Optional[int] = None,
    strict: bool = False,
) -> ExperimentReport:
    """Distribution of the E-LPP value over random clouds.

    Either ``(t, x)`` for a uniform cloud in the continuous box or ``(n, h)``
    for distinct lattice points must be given.

    Reports the empirical tail ``P(L >= k)`` with binomial standard errors,
    the count from which the observed tail ratios stay below a geometric fit
    (``superexponential_from``) next to the count predicted by
    ``k**2 > (B t / x**2)**(1/2) m``, the scale proxy means
    ``E[(L / scale)**b]`` for ``b`` in ``{1, 2}``, the ratio of the witness
    entropy to ``k**4 / m**2 * x**2 / t``, and the ``tail_bound`` curve
    when ``c0`` is given.
    """
    continuous = t is not None and x is not None
    lattice = n is not None and h is not None
    _require(continuous != lattice, "give exactly one of (t, x) or (n, h)")
    _require(m >= 1, f"cloud size must be at least 1, got {m}")
    _require(budget >= 0, f"budget must be nonnegative, got {budget}")
    _require(
        replicas >= TAIL_MIN_REPLICAS,
        f"the tail experiment needs at least {TAIL_MIN_REPLICAS} replicas",
    )
    if continuous:
        box = Box(CONTINUOUS, t, x)
    else:
        box = Box(LATTICE, n, h)
        t, x = n, h
    _require(x > 0, "the box half-width must be positive")
    params = {
        "m": m,
        "B": budget,
        "t": t,
        "x": x,
        "mode": box.mode,
        "replicas": replicas,
        "c0": c0,
    }
    report = ExperimentReport(
        experiment="tail", params=params, master_seed=master_seed,
        strict=strict,
    )
    started = arrow.utcnow()
    runner = ReplicaRunner(threads)
    seeds = [SeedSpec(master_seed, stream_for(r)) for r in range(replicas)]
    outputs = runner.map(
        _tail_worker,
        [
            (m, budget, box.to_dict(), s.master_seed, s.stream_index)
            for s in seeds
        ],
    )
    report.records = [
        ExperimentRecord("tail", params, seed, out)
        for seed, out in zip(seeds, outputs)
    ]

    values = np.array([r.outputs["value"] for r in report.records])
    report.summaries["value"] = SummaryStats.from_sample(values)
    tail = empirical_tail(values)
    report.extras["tail"] = tail.tolist()
    report.extras["tail_stderr"] = binomial_stderr(tail, replicas).tolist()
    threshold = int(math.floor(math.sqrt(math.sqrt(budget * t / (x * x)) * m)))
    report.extras["superexponential_from"] = decay_onset(tail, replicas)
    report.extras["superexponential_from_theory"] = threshold + 1

    scale = scale_of(m, budget, t, x)
    if scale > 0:
        ratios = values / scale
        report.summaries["scale_ratio"] = SummaryStats.from_sample(ratios)
        report.extras["scale_proxy"] = {
            "b1": float(np.mean(ratios)),
            "b2": float(np.mean(ratios**2)),
        }

    collected = [
        (r.outputs["value"], r.outputs["witness_entropy"])
        for r in report.records
        if r.outputs["value"] >= 1
    ]
    if collected:
        report.summaries["entropy_ratio"] = SummaryStats.from_sample(
            [ent / (k**4 / m**2 * x * x / t) for k, ent in collected]
        )
    if c0 is not None:
        ks = np.arange(1, int(values.max()) + 2)
        report.extras["tail_bound"] = np.atleast_1d(
            tail_bound(ks, m, budget, t, x, c0)
        ).tolist()

    median = report.summaries["value"].median
    report.check(
        "tail_ratios_decrease_past_median",
        decays_supergeometrically(
            tail, replicas, start=int(math.ceil(median))
        ),
        f"fitted onset {report.extras['superexponential_from']}",
    )
    _log_done("tail experiment", started, replicas)
    return report


def run_scaling_experiment(
    alpha: float,
    betas: Sequence[float],
    ell: int,
    q: float,
    replicas: int,
    master_seed: int,
    independent: bool = True,
    threads: Optional[int] = None,
    strict: bool = False,
) -> ExperimentReport:
    """Compare ``T_beta`` against ``beta**(2a/(2a-1)) * T_1`` in law.

    ``T_beta`` is sampled on role-0 streams. ``T_1`` comes from role-1
    streams, or from role-0 streams when ``independent`` is false. A second
    independent ``T_1`` sample (role 2) calibrates the KS threshold: twice the
    KS distance between the two ``T_1`` samples. Truncation to ``ell`` records
    on ``[0,1] x [-q,q]`` makes the identity approximate.
    """
    _require(
        0.5 < alpha < 2, f"alpha must lie in (1/2, 2), got {alpha}"
    )
    _require(len(betas) >= 1, "give at least one beta")
    _require(all(b > 0 for b in betas), "betas must be positive")
    _require(ell >= SCALING_MIN_ELL, f"ell must be at least {SCALING_MIN_ELL}")
    _require(q >= SCALING_MIN_Q, f"q must be at least {SCALING_MIN_Q}")
    _require(
        replicas >= SCALING_MIN_REPLICAS,
        f"the scaling experiment needs at least {SCALING_MIN_REPLICAS} "
        "replicas",
    )
    exponent = 2 * alpha / (2 * alpha - 1)
    params = {
        "alpha": alpha,
        "betas": list(betas),
        "ell": ell,
        "q": q,
        "replicas": replicas,
        "independent": independent,
    }
    report = ExperimentReport(
        experiment="scaling", params=params, master_seed=master_seed,
        strict=strict,
    )
    started = arrow.utcnow()
    runner = ReplicaRunner(threads)
    sample = partial(
        _continuum_sample, runner, alpha, q=q, ell=ell, replicas=replicas,
        master_seed=master_seed,
    )

    unit, unit_seeds = sample(nu=1.0, role=1 if independent else 0)
    control, control_seeds = sample(nu=1.0, role=2)
    for role, values, seeds in (
        ("unit", unit, unit_seeds),
        ("control", control, control_seeds),
    ):
        report.records.extend(
            ExperimentRecord(
                "scaling", {**params, "beta": 1.0}, s, {"role": role, "value": v}
            )
            for s, v in zip(seeds, values)
        )
    control_ks = ks_two_sample(unit, control)
    report.summaries["unit"] = SummaryStats.from_sample(unit)
    report.summaries["control"] = SummaryStats.from_sample(
        control, reference=unit
    )
    report.extras["control_ks"] = control_ks
    report.extras["exponent"] = exponent

    ks_by_beta = {}
    for beta in betas:
        values, seeds = sample(nu=float(beta), role=0)
        report.records.extend(
            ExperimentRecord(
                "scaling",
                {**params, "beta": beta},
                s,
                {"role": "beta", "value": v},
            )
            for s, v in zip(seeds, values)
        )
        rescaled = [beta**exponent * v for v in unit]
        label = f"beta={beta:g}"
        report.summaries[label] = SummaryStats.from_sample(
            values, reference=rescaled
        )
        ks_by_beta[label] = report.summaries[label].ks_distance
        report.check(
            f"scaling_{label}",
            ks_by_beta[label] <= 2 * control_ks,
            f"KS {ks_by_beta[label]:.4f} vs threshold {2 * control_ks:.4f}",
        )
    report.extras["ks"] = ks_by_beta

    slope = tail_slope(unit)
    report.extras["tail_slope"] = slope
    report.check(
        "tail_slope",
        math.isfinite(slope) and slope <= -(alpha - 0.5 - SLOPE_SLACK),
        f"slope {slope:.3f}",
    )
    _log_done("scaling experiment", started, replicas)
    return report


def run_convergence_experiment(
    alpha: float,
    nu: float,
    q: float,
    ell: int,
    ladder: Sequence[int],
    replicas: int,
    master_seed: int,
    gamma: Optional[float] = None,
    threads: Optional[int] = None,
    strict: bool = False,
) -> ExperimentReport:
    """KS distance between rescaled lattice values and the continuum law
    along a ladder of boxes.

    Rung ``n`` uses ``h = n**gamma``, the lattice box ``[[1, n]] x
    [[-floor(q h), floor(q h)]]`` and ``beta = beta_for_nu(nu, n, h,
    alpha)``; its sample is ``(n / h**2) * T^(ell)``.
    """
    _check_alpha(alpha)
    _require(len(ladder) >= MIN_LADDER, f"ladder needs {MIN_LADDER} rungs")
    _require(
        all(a < b for a, b in zip(ladder, ladder[1:])),
        "ladder must be strictly ascending",
    )
    _require(nu >= 0 and q > 0 and ell >= 1, "need nu >= 0, q > 0, ell >= 1")
    gamma = current_config.ELPP_CONVERGENCE_GAMMA if gamma is None else gamma
    _require(0.5 < gamma < 1, f"gamma must lie in (1/2, 1), got {gamma}")
    params = {
        "alpha": alpha,
        "nu": nu,
        "q": q,
        "ell": ell,
        "ladder": list(ladder),
        "gamma": gamma,
        "replicas": replicas,
    }
    report = ExperimentReport(
        experiment="convergence", params=params, master_seed=master_seed,
        strict=strict,
    )
    started = arrow.utcnow()
    runner = ReplicaRunner(threads)

    continuum, seeds = _continuum_sample(
        runner, alpha, nu, q, ell, replicas, master_seed, role=0
    )
    report.records.extend(
        ExperimentRecord(
            "convergence", {**params, "rung": "continuum"}, s, {"value": v}
        )
        for s, v in zip(seeds, continuum)
    )
    report.summaries["continuum"] = SummaryStats.from_sample(continuum)

    distances = []
    for index, n in enumerate(ladder):
        h = float(n) ** gamma
        beta = beta_for_nu(nu, n, h, alpha)
        rung_seeds = [
            SeedSpec(master_seed, stream_for(r, index + 1))
            for r in range(replicas)
        ]
        values = runner.map(
            _lattice_worker,
            [
                (alpha, beta, n, h, q, ell, s.master_seed, s.stream_index)
                for s in rung_seeds
            ],
        )
        rung_params = {**params, "rung": n, "h": h, "beta": beta}
        report.records.extend(
            ExperimentRecord("convergence", rung_params, s, {"value": v})
            for s, v in zip(rung_seeds, values)
        )
        label = f"n={n}"
        report.summaries[label] = SummaryStats.from_sample(
            values, reference=continuum
        )
        distances.append(report.summaries[label].ks_distance)
        logger.info("rung n=%d: KS %.4f", n, distances[-1])

    report.extras["ks"] = distances
    report.check(
        "ks_nonincreasing",
        all(b <= a for a, b in zip(distances, distances[1:])),
        f"KS along ladder {distances}",
    )
    _log_done("convergence experiment", started, replicas * (len(ladder) + 1))
    return report


def _within_growth(values: Sequence[float], growth: float) -> bool:
    """Whether every value is finite and at most ``growth`` times the first.

    >>> _within_growth([2.0, 5.0, 1.0], 4.0), _within_growth([1.0, 5.0], 4.0)
    (True, False)
    >>> _within_growth([0.0, 0.0], 4.0)
    True
    """
    if not all(math.isfinite(v) for v in values):
        return False
    if values[0] <= 0:
        return all(v <= 0 for v in values)
    return max(values) <= growth * values[0]


def run_truncation_experiment(
    alpha: float,
    q: float,
    ells: Sequence[int],
    replicas: int,
    master_seed: int,
    mode: str = "continuum",
    nu: float = 1.0,
    n: Optional[int] = None,
    h: Optional[float] = None,
    top_k: Optional[int] = None,
    threads: Optional[int] = None,
    strict: bool = False,
) -> ExperimentReport:
    """Decay of what lies beyond the ``ell`` largest weights.

    ``discrete`` mode samples lattice fields on ``[[1, n]] x [[-q h, q h]]``
    keeping ``top_k`` records (default ``4 * max(ells)``) and reports the
    tail value over ranks past ``ell`` rescaled by
    ``(beta m(nh/ell))**(4/3) * (ell**2 n/h**2)**(1/3)``, next to the head
    value rescaled by ``(beta m(nh))**(4/3) * (n/h**2)**(1/3)``.

    ``continuum`` mode reports the increments ``T^(2 ell) - T^(ell)``.

    In both modes the median must not increase with ``ell``. In discrete
    mode the rescaled tail medians must also stay finite and within
    ``ELPP_TRUNCATION_GROWTH`` times the one at the smallest ``ell``.
    """
    _check_alpha(alpha)
    _require(len(ells) >= 1 and ells[0] >= 1, "ells must be positive")
    _require(
        all(a < b for a, b in zip(ells, ells[1:])), "ells must be ascending"
    )
    _require(mode in ("discrete", "continuum"), f"unknown mode {mode!r}")
    _require(nu >= 0 and q > 0, "need nu >= 0 and q > 0")
    params = {
        "alpha": alpha,
        "q": q,
        "ells": list(ells),
        "mode": mode,
        "nu": nu,
        "replicas": replicas,
    }
    started = arrow.utcnow()
    runner = ReplicaRunner(threads)
    seeds = [SeedSpec(master_seed, stream_for(r)) for r in range(replicas)]

    if mode == "discrete":
        _require(n is not None and h is not None, "discrete mode needs n, h")
        top_k = top_k or 4 * max(ells)
        beta = beta_for_nu(nu, n, h, alpha)
        params.update({"n": n, "h": h, "top_k": top_k, "beta": beta})
        outputs = runner.map(
            _truncation_lattice_worker,
            [
                (alpha, beta, n, h, q, list(ells), top_k, s.master_seed,
                 s.stream_index)
                for s in seeds
            ],
        )
        key = "tail"
    else:
        outputs = runner.map(
            _truncation_continuum_worker,
            [
                (alpha, nu, q, list(ells), s.master_seed, s.stream_index)
                for s in seeds
            ],
        )
        key = "increment"

    report = ExperimentReport(
        experiment="truncation", params=params, master_seed=master_seed,
        strict=strict,
    )
    report.records = [
        ExperimentRecord("truncation", params, s, out)
        for s, out in zip(seeds, outputs)
    ]

    medians = []
    rescaled_medians = []
    for i, ell in enumerate(ells):
        raw = np.array([out[key][i] for out in outputs])
        report.summaries[f"{key}_ell={ell}"] = SummaryStats.from_sample(raw)
        medians.append(report.summaries[f"{key}_ell={ell}"].median)
        if mode == "discrete":
            tail_norm = (beta * m_of(n * h / ell, alpha)) ** (4 / 3) * (
                ell * ell * n / (h * h)
            ) ** (1 / 3)
            head_norm = (beta * m_of(n * h, alpha)) ** (4 / 3) * (
                n / (h * h)
            ) ** (1 / 3)
            heads = np.array([out["head"][i] for out in outputs])
            report.summaries[f"rescaled_tail_ell={ell}"] = (
                SummaryStats.from_sample(raw / tail_norm)
            )
            rescaled_medians.append(
                report.summaries[f"rescaled_tail_ell={ell}"].median
            )
            report.summaries[f"rescaled_head_ell={ell}"] = (
                SummaryStats.from_sample(heads / head_norm)
            )
        else:
            report.check(
                f"increment_nonnegative_ell={ell}",
                bool(np.all(raw >= -1e-12)),
            )

    report.extras["medians"] = medians
    if mode == "discrete":
        report.extras["rescaled_tail_medians"] = rescaled_medians
        report.check(
            "rescaled_tail_bounded",
            _within_growth(
                rescaled_medians, current_config.ELPP_TRUNCATION_GROWTH
            ),
            f"rescaled tail medians {rescaled_medians}",
        )
    report.check(
        "median_nonincreasing",
        all(b <= a for a, b in zip(medians, medians[1:])),
        f"medians {medians}",
    )
    _log_done("truncation experiment", started, replicas)
    return report


def _median_ratios(medians: Sequence[float]) -> list[float]:
    ratios = []
    for a, b in zip(medians, medians[1:]):
        if a > 0:
            ratios.append(b / a)
        else:
            ratios.append(math.inf if b > 0 else math.nan)
    return ratios


def run_blowup_demo(
    alpha: float,
    beta: float,
    q_ladder: Sequence[float],
    ell0: float,
    replicas: int,
    master_seed: int,
    control_alpha: float = 1.0,
    threads: Optional[int] = None,
    strict: bool = False,
) -> ExperimentReport:
    """Growth of the truncated continuum value along widening strips.

    Rung ``q`` keeps ``ceil(ell0 * q)`` records so the record density per
    unit area stays fixed. For ``alpha <= 1/2`` the median should grow by at
    least ``ELPP_BLOWUP_RATIO`` per rung over the top rungs; the control at
    ``control_alpha`` should settle inside ``ELPP_BLOWUP_CONTROL_BAND``.
    """
    _require(0 < alpha <= 0.5, f"alpha must lie in (0, 1/2], got {alpha}")
    _require(beta >= 0 and ell0 > 0, "need beta >= 0 and ell0 > 0")
    _require(len(q_ladder) >= 2, "q ladder needs at least two rungs")
    _require(
        all(a < b for a, b in zip(q_ladder, q_ladder[1:])) and q_ladder[0] > 0,
        "q ladder must be positive and ascending",
    )
    params = {
        "alpha": alpha,
        "beta": beta,
        "q_ladder": list(q_ladder),
        "ell0": ell0,
        "replicas": replicas,
        "control_alpha": control_alpha,
    }
    report = ExperimentReport(
        experiment="blowup", params=params, master_seed=master_seed,
        strict=strict,
    )
    started = arrow.utcnow()
    runner = ReplicaRunner(threads)
    rungs = len(q_ladder)

    medians = {"main": [], "control": []}
    for index, q in enumerate(q_ladder):
        ell = int(math.ceil(ell0 * q))
        for series, a, role in (
            ("main", alpha, index),
            ("control", control_alpha, rungs + index),
        ):
            values, seeds = _continuum_sample(
                runner, a, beta, q, ell, replicas, master_seed, role
            )
            rung_params = {**params, "series": series, "q": q, "ell": ell}
            report.records.extend(
                ExperimentRecord("blowup", rung_params, s, {"value": v})
                for s, v in zip(seeds, values)
            )
            label = f"{series}_q={q:g}"
            report.summaries[label] = SummaryStats.from_sample(values)
            medians[series].append(report.summaries[label].median)

    ratios = _median_ratios(medians["main"])
    control_ratios = _median_ratios(medians["control"])
    report.extras["medians"] = medians
    report.extras["ratios"] = {"main": ratios, "control": control_ratios}

    top = ratios[-min(2, len(ratios)):]
    report.check(
        "diverges",
        all(r >= current_config.ELPP_BLOWUP_RATIO for r in top),
        f"median ratios {ratios}",
    )
    low, high = current_config.ELPP_BLOWUP_CONTROL_BAND
    report.check(
        "control_stable",
        low <= control_ratios[-1] <= high,
        f"control ratios {control_ratios}",
    )
    _log_done("blow-up demo", started, replicas * 2 * rungs)
    return report
