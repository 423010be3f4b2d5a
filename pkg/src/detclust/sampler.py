"""Posterior samplers: Gibbs over partitions, exchange moves over hyperparameters.

The partition sampler is a collapsed Gibbs scheme: each unlabeled point
is detached, the log-weight of every destination (existing clusters plus
a fresh singleton) is computed from one-point Schur complements, and the
point is reassigned by a log-sum-exp categorical draw.

The hyperparameter posterior is doubly intractable (the partition
likelihood's normalizer, a sum over all set partitions, is unavailable),
so kernel hyperparameters and temperature move by exchange sampling: a
symmetric proposal, an auxiliary partition drawn under the proposed
parameters, and an acceptance ratio in which the intractable normalizers
cancel.  Auxiliary draws are exact (full enumeration) below a size
threshold and otherwise approximate via a fresh finite Gibbs chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _backend
from .kernels import KernelFamily, KernelParams, cross_vector, self_kernel
from .linalg import DEGENERACY_FLOOR, DEFAULT_REBUILD_INTERVAL
from .partitions import (
    LOG_ZERO,
    ClusterState,
    LabelConstraints,
    Partition,
    constraints_from_labels,
    enumerate_partitions,
    log_likelihood,
    partition_log_det,
    satisfies_constraints,
)

# Independent seed streams so data generation, the partition chain and
# the hyperparameter proposals never share random state.
CHAIN_STREAM = 1
PROPOSAL_STREAM = 2


class InitMode(str, Enum):
    SINGLETONS = "singletons"
    RANDOM_ANCHORS = "random-anchors"


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs for one inference run.

    `aux_sweeps` is the auxiliary Gibbs chain length inside each
    exchange move; `exact_aux_threshold` is the point count at or below
    which the auxiliary partition is instead drawn exactly by
    enumeration.  `proposal_step` scales the log-space random walk.
    """

    n_sweeps: int = 500
    burn_in: int = 100
    thin: int = 1
    seed: int = 0
    aux_sweeps: int = 20
    exact_aux_threshold: int = 9
    proposal_step: float = 0.2
    rebuild_interval: int = DEFAULT_REBUILD_INTERVAL
    init_mode: InitMode = InitMode.SINGLETONS
    freeze_temperature: bool = False

    def __post_init__(self):
        object.__setattr__(self, "init_mode", InitMode(self.init_mode))
        for name in ("n_sweeps", "burn_in", "thin", "seed", "aux_sweeps",
                     "exact_aux_threshold", "rebuild_interval"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if min(self.n_sweeps, self.burn_in, self.aux_sweeps, self.exact_aux_threshold) < 0:
            raise ValueError("sweep, burn-in and auxiliary counts must be non-negative")
        if self.thin < 1:
            raise ValueError("thin must be at least 1")
        if self.rebuild_interval < 1:
            raise ValueError("rebuild_interval must be at least 1")
        if not self.proposal_step > 0:
            raise ValueError("proposal_step must be positive")


def _normal_logpdf(x: float, loc: float, scale: float) -> float:
    z = (x - loc) / scale
    return -0.5 * z * z - math.log(scale) - 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class HyperPrior:
    """Independent log-normal priors on the positive sampler parameters.

    One (location, scale) pair is shared by every lengthscale (and by
    the delta kernel's value parameter), another governs temperature.
    Densities are evaluated over the log-parameters; since proposals are
    symmetric random walks in log space, the ratio of these densities is
    the complete prior-and-proposal correction in the acceptance rule.
    """

    lengthscale_loc: float = 0.0
    lengthscale_scale: float = 1.0
    temperature_loc: float = 0.0
    temperature_scale: float = 1.0

    def __post_init__(self):
        if not (self.lengthscale_scale > 0 and self.temperature_scale > 0):
            raise ValueError("prior scales must be positive")

    def _kernel_values(self, params: KernelParams) -> tuple[float, ...]:
        if params.family is KernelFamily.SQUARED_EXPONENTIAL:
            return params.lengthscales
        return (params.delta_value,)

    def log_density(self, params: KernelParams) -> float:
        total = sum(
            _normal_logpdf(math.log(v), self.lengthscale_loc, self.lengthscale_scale)
            for v in self._kernel_values(params)
        )
        total += _normal_logpdf(
            math.log(params.temperature), self.temperature_loc, self.temperature_scale
        )
        return total

    def propose(self, params: KernelParams, step: float, rng,
                freeze_temperature: bool = False) -> KernelParams:
        """Gaussian random-walk step in log space on every sampled parameter."""
        temperature = params.temperature
        if not freeze_temperature:
            temperature = math.exp(math.log(temperature) + step * rng.standard_normal())
        if params.family is KernelFamily.SQUARED_EXPONENTIAL:
            logs = np.log(params.lengthscales) + step * rng.standard_normal(len(params.lengthscales))
            return KernelParams(
                KernelFamily.SQUARED_EXPONENTIAL,
                lengthscales=tuple(np.exp(logs)),
                temperature=temperature,
                scale=params.scale,
            )
        value = math.exp(math.log(params.delta_value) + step * rng.standard_normal())
        return KernelParams(
            KernelFamily.DELTA, delta_value=value,
            temperature=temperature, scale=params.scale,
        )


@dataclass(frozen=True)
class GridPrior:
    """Uniform prior over a finite set of kernel configurations.

    Proposals draw uniformly and independently from the grid, which is
    symmetric, so the acceptance correction reduces to the likelihood
    ratio.  Configurations outside the grid carry zero density.
    """

    grid: tuple[KernelParams, ...]

    def __post_init__(self):
        grid = tuple(self.grid)
        if len(grid) == 0:
            raise ValueError("grid must be non-empty")
        if len(set(grid)) != len(grid):
            raise ValueError("grid contains duplicate configurations")
        object.__setattr__(self, "grid", grid)

    def log_density(self, params: KernelParams) -> float:
        if params in self.grid:
            return -math.log(len(self.grid))
        return LOG_ZERO

    def propose(self, params: KernelParams, step: float, rng,
                freeze_temperature: bool = False) -> KernelParams:
        return self.grid[int(rng.integers(len(self.grid)))]


@dataclass(frozen=True)
class TraceSample:
    sweep: int
    partition: Partition
    params: KernelParams
    log_likelihood: float


@dataclass
class PosteriorTrace:
    """Thinned post-burn-in samples plus sampler diagnostics."""

    samples: list[TraceSample] = field(default_factory=list)
    hyper_accept_count: int = 0
    hyper_propose_count: int = 0
    degeneracy_count: int = 0

    @property
    def acceptance_rate(self) -> float:
        if self.hyper_propose_count == 0:
            return 0.0
        return self.hyper_accept_count / self.hyper_propose_count

    def partitions(self) -> list[Partition]:
        return [s.partition for s in self.samples]


def _sample_log_categorical(log_weights: np.ndarray, rng) -> int:
    """Draw an index proportional to exp(log_weights), stably."""
    top = np.max(log_weights)
    if top == LOG_ZERO or not math.isfinite(top):
        raise ValueError("no candidate has positive probability")
    p = np.exp(log_weights - top)
    c = np.cumsum(p)
    u = rng.random() * c[-1]
    return min(int(np.searchsorted(c, u, side="right")), len(c) - 1)


def _log_normalize(log_weights: np.ndarray) -> np.ndarray:
    top = np.max(log_weights)
    p = np.exp(log_weights - top)
    return p / p.sum()


def gibbs_conditional(state: ClusterState, x: int, params: KernelParams) -> np.ndarray:
    """Log-weights of the full conditional for a detached point x.

    Entry m < M is -temperature * log(Schur complement of x against
    cluster m); the last entry, for opening a new cluster, is
    -temperature * log k(x,x).  Complements at or below the degeneracy
    floor are clamped to it and counted on the state.
    """
    logw, _ = _conditional_terms(state, x, params)
    return logw


def _conditional_terms(state: ClusterState, x: int, params: KernelParams):
    if state.cluster_of[x] != -1:
        raise ValueError(f"point {x} must be detached before computing its conditional")
    core = _backend.core
    xp = state.points[x]
    k_self = self_kernel(params)
    tau = params.temperature
    m = len(state.clusters)
    logw = np.empty(m + 1)
    crosses = []
    for ci, cl in enumerate(state.clusters):
        cross = cross_vector(cl.rows, xp, params)
        w = k_self - core.quad_form(cl.cache.inverse, cross)
        if w <= DEGENERACY_FLOOR:
            w = DEGENERACY_FLOOR
            state.degeneracy_count += 1
        logw[ci] = -tau * math.log(w)
        crosses.append(cross)
    logw[m] = -tau * math.log(k_self)
    return logw, crosses


def gibbs_sweep(state: ClusterState, params: KernelParams,
                constraints: LabelConstraints, rng) -> ClusterState:
    """One pass of single-point Gibbs moves over the unlabeled points.

    Visits the unlabeled points in a fresh random order; labeled points
    never move, so clusters anchored by different labels can never
    merge and the constraints hold by construction.
    """
    n = state.n_points
    anchored = np.zeros(n, dtype=bool)
    if len(constraints) > 0:
        anchored[list(constraints.labeled_indices)] = True
    movable = np.flatnonzero(~anchored)
    for x in rng.permutation(movable):
        x = int(x)
        state.detach_point(x, params)
        logw, crosses = _conditional_terms(state, x, params)
        dest = _sample_log_categorical(logw, rng)
        cross = crosses[dest] if dest < len(crosses) else None
        state.attach_point(x, dest, params, cross)
    if len(constraints) > 0:
        assert satisfies_constraints(state.partition(), constraints)
    return state


def init_state(points: np.ndarray, constraints: LabelConstraints,
               params: KernelParams, mode: InitMode, rng,
               rebuild_interval: int = DEFAULT_REBUILD_INTERVAL) -> ClusterState:
    """Build a constraint-satisfying initial state.

    Labeled points are grouped into one anchor cluster per label group.
    Unlabeled points either each open their own cluster (Singletons) or
    are dropped sequentially into a uniformly random existing-or-new
    cluster (RandomAnchors).
    """
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    assignment = np.full(n, -1, dtype=np.intp)
    for i, g in zip(constraints.labeled_indices, constraints.group_ids):
        assignment[i] = g
    next_id = constraints.num_groups
    mode = InitMode(mode)
    for i in range(n):
        if assignment[i] >= 0:
            continue
        if mode is InitMode.SINGLETONS:
            assignment[i] = next_id
            next_id += 1
        else:
            choice = int(rng.integers(next_id + 1))
            assignment[i] = choice
            if choice == next_id:
                next_id += 1
    return ClusterState.from_assignment(pts, assignment, params, rebuild_interval)


def exact_posterior(points, params: KernelParams,
                    constraints: LabelConstraints | None = None) -> dict[Partition, float]:
    """Exhaustive partition posterior at small N.

    Enumerates every partition (subject to the constraints), scores each
    with the determinant likelihood, and normalizes.  Per-cluster
    log-determinants are memoized across partitions since the same
    member subsets recur many times.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"points must be a non-empty 2-d array, got shape {pts.shape}")
    n = pts.shape[0]
    tau = params.temperature
    subset_log_det: dict[tuple[int, ...], float] = {}

    def cluster_term(members: tuple[int, ...]) -> float:
        cached = subset_log_det.get(members)
        if cached is None:
            cached = partition_log_det(pts, [members], params)
            subset_log_det[members] = cached
        return cached

    parts: list[Partition] = []
    logw: list[float] = []
    for p in enumerate_partitions(n):
        if constraints is not None and not satisfies_constraints(p, constraints):
            continue
        total = sum(cluster_term(tuple(c)) for c in p.clusters())
        parts.append(p)
        logw.append(-tau * total)
    if not parts:
        raise ValueError("constraints admit no partition")
    arr = np.asarray(logw)
    top = np.max(arr)
    weights = np.exp(arr - top)
    weights /= weights.sum()
    return dict(zip(parts, weights))


def _draw_from_distribution(dist: dict[Partition, float], rng) -> Partition:
    parts = list(dist.keys())
    c = np.cumsum(np.fromiter(dist.values(), dtype=np.float64, count=len(parts)))
    u = rng.random() * c[-1]
    return parts[min(int(np.searchsorted(c, u, side="right")), len(parts) - 1)]


def _auxiliary_partition(points: np.ndarray, params: KernelParams,
                         constraints: LabelConstraints, config: SamplerConfig,
                         rng) -> list[list[int]]:
    """Draw the exchange move's auxiliary partition under `params`.

    Exact by enumeration at or below `exact_aux_threshold` points,
    otherwise approximate: a singleton-initialized Gibbs chain of
    `aux_sweeps` sweeps.  The draw respects the same constraints as the
    observed partition; both likelihoods in the acceptance ratio must
    share one support for the normalizers to cancel.
    """
    n = points.shape[0]
    if n <= config.exact_aux_threshold:
        dist = exact_posterior(points, params, constraints)
        return _draw_from_distribution(dist, rng).clusters()
    state = init_state(points, constraints, params, InitMode.SINGLETONS, rng,
                       config.rebuild_interval)
    for _ in range(config.aux_sweeps):
        gibbs_sweep(state, params, constraints, rng)
    return state.member_lists()


def exchange_update(params: KernelParams, state: ClusterState, prior,
                    config: SamplerConfig, rng,
                    constraints: LabelConstraints | None = None,
                    proposed: KernelParams | None = None) -> tuple[KernelParams, bool]:
    """One exchange move on (kernel hyperparameters, temperature).

    Proposes symmetrically, draws an auxiliary partition under the
    proposal, and accepts with probability

        min(1, [L(S|new) * L(aux|old) * prior(new)]
             / [L(S|old) * L(aux|new) * prior(old)])

    where L is the unnormalized partition likelihood; the intractable
    normalizers cancel between the observed and auxiliary terms.  The
    current state is read, never modified.  `proposed` forces a
    specific proposal (used by tests).
    """
    if constraints is None:
        constraints = LabelConstraints.none()
    if proposed is None:
        proposed = prior.propose(params, config.proposal_step, rng,
                                 config.freeze_temperature)
    lp_cur = prior.log_density(params)
    lp_new = prior.log_density(proposed)
    if lp_new == LOG_ZERO:
        return params, False
    groups = state.member_lists()
    ll_cur = -params.temperature * partition_log_det(state.points, groups, params)
    ll_new = -proposed.temperature * partition_log_det(state.points, groups, proposed)
    aux = _auxiliary_partition(state.points, proposed, constraints, config, rng)
    aux_ld_new = partition_log_det(state.points, aux, proposed)
    aux_ld_cur = partition_log_det(state.points, aux, params)
    log_ratio = (
        (ll_new - ll_cur)
        + (-params.temperature * aux_ld_cur) - (-proposed.temperature * aux_ld_new)
        + (lp_new - lp_cur)
    )
    if log_ratio >= 0.0 or rng.random() < math.exp(log_ratio):
        return proposed, True
    return params, False


def _gram_parameters_changed(a: KernelParams, b: KernelParams) -> bool:
    return (a.family, a.lengthscales, a.delta_value, a.scale) != (
        b.family, b.lengthscales, b.delta_value, b.scale)


def run_inference(data, params0: KernelParams, prior,
                  config: SamplerConfig) -> PosteriorTrace:
    """Full posterior run: alternating partition sweeps and exchange moves.

    `data` is a DataSet (points plus optional labels) or a bare point
    array treated as fully unlabeled.  Pass prior=None to hold the
    hyperparameters fixed (pure Gibbs).  Deterministic given
    config.seed; the partition chain and the hyperparameter proposals
    consume independent seeded streams.
    """
    from .data import DataSet

    if isinstance(data, DataSet):
        points = data.points
        constraints = constraints_from_labels(data.labels)
    else:
        points = np.ascontiguousarray(data, dtype=np.float64)
        constraints = LabelConstraints.none()
    rng_chain = np.random.default_rng((config.seed, CHAIN_STREAM))
    rng_prop = np.random.default_rng((config.seed, PROPOSAL_STREAM))
    state = init_state(points, constraints, params0, config.init_mode, rng_chain,
                       config.rebuild_interval)
    params = params0
    trace = PosteriorTrace()
    for sweep in range(1, config.n_sweeps + 1):
        gibbs_sweep(state, params, constraints, rng_chain)
        if prior is not None:
            params_new, accepted = exchange_update(
                params, state, prior, config, rng_prop, constraints=constraints)
            trace.hyper_propose_count += 1
            if accepted:
                trace.hyper_accept_count += 1
                if _gram_parameters_changed(params, params_new):
                    state.rebuild(params_new)
                params = params_new
        if sweep > config.burn_in and (sweep - config.burn_in) % config.thin == 0:
            ll = log_likelihood(state, params, constraints)
            assert ll > LOG_ZERO, "recorded sample violates the label constraints"
            trace.samples.append(TraceSample(sweep, state.partition(), params, ll))
    trace.degeneracy_count = state.degeneracy_count
    return trace
