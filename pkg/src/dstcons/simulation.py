"""The iterated consensus dynamics: noisy evidential updating plus pairwise fusion.

Each iteration, every agent independently receives evidence about a
pignistically-selected state with probability ``r``; afterwards one random
pair of agents replaces both beliefs with their operator combination.  A run
ends when the whole population has been unchanged (within ``EPS_CONV``) for
``convergence_window`` consecutive iterations, or at the iteration cap.

Runs are strictly sequential and fully determined by the config seed;
distinct runs share no state and can execute in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum
from typing import Sequence

import numpy as np

from .evidence import (
    NoiseSpec,
    QualityProfile,
    default_qualities,
    evidence_mass,
    select_state,
)
from .mass import (
    FrameOfDiscernment,
    MassFunction,
    TotalConflictError,
    approx_eq,
    bel,
    get_combiner,
    make_vacuous,
    pl,
    renormalize,
)

# Componentwise tolerance for "unchanged" in convergence detection.
EPS_CONV = 1e-9


@dataclass(frozen=True)
class SimConfig:
    """Parameters of a single simulation run."""

    operator: str
    k: int = 100
    n: int = 3
    r: float = 0.05
    sigma: float = 0.0
    max_iterations: int = 5000
    consensus_enabled: bool = True
    seed: int = 0
    trajectory_stride: int = 0
    convergence_window: int = 100
    evidence_first: bool = True

    def __post_init__(self) -> None:
        get_combiner(self.operator)
        if self.n < 2:
            raise ValueError(f"need n >= 2 states, got {self.n}")
        min_k = 2 if self.consensus_enabled else 1
        if self.k < min_k:
            raise ValueError(f"need k >= {min_k} agents, got {self.k}")
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"evidence rate must lie in [0, 1], got {self.r}")
        if self.sigma < 0.0:
            raise ValueError(f"noise sigma must be >= 0, got {self.sigma}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.convergence_window < 1:
            raise ValueError("convergence_window must be >= 1")
        if self.trajectory_stride < 0:
            raise ValueError("trajectory_stride must be >= 0 (0 disables recording)")


@dataclass
class AgentPopulation:
    """The k agents' current mass functions plus iteration bookkeeping."""

    frame: FrameOfDiscernment
    agents: list[MassFunction]
    iteration: int = 0
    dempster_skips: int = 0


@dataclass
class RunResult:
    """Outcome of one run: convergence info, steady state, sampled trajectory."""

    config: SimConfig
    converged: bool
    convergence_iteration: int | None
    steady_state: list[MassFunction]
    trajectory_iterations: np.ndarray
    trajectory_bel: np.ndarray
    trajectory_pl_best: np.ndarray
    dempster_skips: int


def init_population(config: SimConfig) -> AgentPopulation:
    """Every agent starts in complete ignorance (the vacuous mass function)."""
    frame = FrameOfDiscernment(config.n)
    vacuous = make_vacuous(frame)
    return AgentPopulation(frame, [vacuous] * config.k)


def evidence_step(
    pop: AgentPopulation,
    profile: QualityProfile,
    config: SimConfig,
    rng: np.random.Generator,
) -> AgentPopulation:
    """One round of evidential updating; mutates and returns ``pop``.

    Each agent independently passes an evidence gate with probability ``r``,
    selects a state from its pignistic distribution, and fuses the (noisy)
    evidence mass into its belief.  A totally conflicting Dempster update is
    skipped, leaving the agent unchanged.
    """
    combine = get_combiner(config.operator)
    frame = pop.frame
    agents = pop.agents
    noise = NoiseSpec(config.sigma)
    gates = rng.random(config.k)
    for idx in np.flatnonzero(gates < config.r):
        m = agents[idx]
        i = select_state(m, rng)
        ev = evidence_mass(frame, i, profile.quality(i), noise.draw(rng))
        try:
            updated = combine(m, ev)
        except TotalConflictError:
            pop.dempster_skips += 1
            continue
        agents[idx] = renormalize(updated)
    return pop


def consensus_step(
    pop: AgentPopulation, config: SimConfig, rng: np.random.Generator
) -> AgentPopulation:
    """One pairwise fusion; mutates and returns ``pop``.

    Two distinct agents are chosen uniformly at random and both adopt the
    combination of their beliefs.  Under Dempster's rule a fully conflicting
    pair (K = 1) does not form consensus: the pair is left unchanged and the
    skip is counted.
    """
    i = int(rng.integers(config.k))
    j = int(rng.integers(config.k - 1))
    if j >= i:
        j += 1
    combine = get_combiner(config.operator)
    try:
        combined = combine(pop.agents[i], pop.agents[j])
    except TotalConflictError:
        pop.dempster_skips += 1
        return pop
    updated = renormalize(combined)
    pop.agents[i] = updated
    pop.agents[j] = updated
    return pop


def check_convergence(
    history: Sequence[Sequence[MassFunction]], eps: float = EPS_CONV
) -> bool:
    """True iff every agent is unchanged across every consecutive snapshot pair.

    ``history`` holds population snapshots from consecutive iterations; pass
    the last ``window + 1`` snapshots to test "unchanged for ``window``
    iterations".
    """
    if len(history) < 2:
        raise ValueError("need at least two snapshots to check convergence")
    for earlier, later in zip(history, history[1:]):
        for a, b in zip(earlier, later):
            if a is not b and not approx_eq(a, b, eps):
                return False
    return True


def population_mean_bel(agents: Sequence[MassFunction], subset: int) -> float:
    """Population mean of Bel(subset)."""
    return fsum(bel(m, subset) for m in agents) / len(agents)


def population_mean_pl(agents: Sequence[MassFunction], subset: int) -> float:
    """Population mean of Pl(subset)."""
    return fsum(pl(m, subset) for m in agents) / len(agents)


def run(config: SimConfig) -> RunResult:
    """Execute a full run; deterministic given the config (including seed)."""
    profile = default_qualities(config.n)
    rng = np.random.default_rng(config.seed)
    pop = init_population(config)
    frame = pop.frame
    stride = config.trajectory_stride

    sample_iters: list[int] = []
    sample_bel: list[np.ndarray] = []
    sample_pl: list[float] = []

    def record(t: int) -> None:
        bels, pl_best = _population_means(pop.agents, frame)
        sample_iters.append(t)
        sample_bel.append(bels)
        sample_pl.append(pl_best)

    if stride:
        record(0)

    prev = pop.agents.copy()
    stable = 0
    converged = False
    convergence_iteration: int | None = None
    t = 0
    for t in range(1, config.max_iterations + 1):
        if config.evidence_first:
            evidence_step(pop, profile, config, rng)
            if config.consensus_enabled:
                consensus_step(pop, config, rng)
        else:
            if config.consensus_enabled:
                consensus_step(pop, config, rng)
            evidence_step(pop, profile, config, rng)
        pop.iteration = t

        agents = pop.agents
        unchanged = all(
            a is b or approx_eq(a, b, EPS_CONV) for a, b in zip(agents, prev)
        )
        stable = stable + 1 if unchanged else 0
        prev = agents.copy()

        if stride and t % stride == 0:
            record(t)
        if stable >= config.convergence_window:
            converged = True
            convergence_iteration = t
            break

    if stride and sample_iters[-1] != t:
        record(t)

    n = config.n
    return RunResult(
        config=config,
        converged=converged,
        convergence_iteration=convergence_iteration,
        steady_state=pop.agents.copy(),
        trajectory_iterations=np.array(sample_iters, dtype=int),
        trajectory_bel=(
            np.array(sample_bel) if sample_bel else np.empty((0, n))
        ),
        trajectory_pl_best=np.array(sample_pl),
        dempster_skips=pop.dempster_skips,
    )


def _population_means(
    agents: Sequence[MassFunction], frame: FrameOfDiscernment
) -> tuple[np.ndarray, float]:
    # Bel of a singleton is just its own focal entry; Pl scans intersections.
    n = frame.n
    best = frame.singleton(n)
    bels = np.zeros(n)
    pl_best = 0.0
    for m in agents:
        for j in range(n):
            bels[j] += m.focal.get(1 << j, 0.0)
        for a, v in m.focal.items():
            if a & best:
                pl_best += v
    k = len(agents)
    return bels / k, pl_best / k
