"""Repulsive particle swarm minimization over a bounded box.

Velocity updates blend inertia, attraction to the personal and neighborhood
bests, and a box-scaled random perturbation. After moving, each particle
probes along and against its velocity with halving steps, then spends a few
line minimizations sharpening its personal best with an adaptive direction
set (Powell-style), which is what carries convergence through narrow curved
valleys; the worst few particles are re-seeded every iteration. Randomness
comes from one master generator consumed in a pinned order (positions, then
per-particle velocity draws in index order, then resets), so runs are
reproducible bit for bit regardless of how evaluations are parallelized.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .assignment import solve_lists

__all__ = [
    "SearchBounds",
    "Particle",
    "SwarmConfig",
    "ConvergenceTrace",
    "OptimizeResult",
    "initialize",
    "update_velocity",
    "local_search",
    "reset_worst",
    "neighborhood",
    "optimize",
]

TOPOLOGIES = ("closest", "ring", "random")


@dataclass(frozen=True)
class SearchBounds:
    """Per-dimension box limits on the flattened candidate vector."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError(
                f"bounds must be equal-length 1-D arrays, got {lower.shape} "
                f"and {upper.shape}"
            )
        if not np.all(lower < upper):
            d = int(np.argmin(upper - lower))
            raise ValueError(
                f"lower bound must be < upper in every dimension; dimension "
                f"{d} has [{lower[d]}, {upper[d]}]"
            )
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    @classmethod
    def for_objects(cls, n_objects: int,
                    a_range=(42164.0 - 200.0, 42164.0 + 200.0),
                    e_range=(0.0, 0.1),
                    inc_range=(0.0, math.radians(1.5)),
                    raan_range=(-math.pi, math.pi),
                    theta_range=(-math.pi, math.pi)) -> "SearchBounds":
        """Box over n objects x (a, e, inc, raan, theta); defaults suit the
        near-geostationary campaign."""
        if n_objects < 1:
            raise ValueError("need at least one object")
        per_obj = [a_range, e_range, inc_range, raan_range, theta_range]
        lower = np.array([r[0] for r in per_obj] * n_objects)
        upper = np.array([r[1] for r in per_obj] * n_objects)
        return cls(lower, upper)


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    current_fitness: float = math.inf
    personal_best_position: np.ndarray | None = None
    personal_best_fitness: float = math.inf


@dataclass(frozen=True)
class SwarmConfig:
    """Swarm run settings; the defaults are the calibrated standard set.

    ``repulsion`` scales the random perturbation term, which is already
    box-width-scaled per dimension. ``refine_lines`` sets how many directed
    line minimizations each particle spends per iteration sharpening its
    personal best (the direction set adapts Powell-style, which is what
    lets the swarm finish convergence inside narrow curved valleys). With a
    fixed seed the whole run is deterministic, independent of the worker
    count.
    """

    particle_count: int = 100
    iteration_count: int = 400
    eval_budget: int | None = None
    neighborhood_size: int = 10
    topology: str = "closest"
    local_search_steps: int = 2
    worst_reset_count: int = 2
    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49
    repulsion: float = 0.002
    v_max_frac: float = 0.5
    v_init_frac: float = 0.1
    refine_lines: int = 2
    refine_step_frac: float = 0.02
    symmetry_blocks: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.particle_count < 1:
            raise ValueError(f"particle_count must be >= 1, got {self.particle_count}")
        if self.iteration_count < 0:
            raise ValueError(f"iteration_count must be >= 0, got {self.iteration_count}")
        if not (0 <= self.neighborhood_size < self.particle_count):
            raise ValueError(
                f"neighborhood_size must be in [0, particle_count), got "
                f"{self.neighborhood_size} with {self.particle_count} particles"
            )
        if self.topology not in TOPOLOGIES:
            raise ValueError(
                f"topology must be one of {TOPOLOGIES}, got {self.topology!r}"
            )
        if self.local_search_steps < 0:
            raise ValueError("local_search_steps must be >= 0")
        if self.refine_lines < 0:
            raise ValueError("refine_lines must be >= 0")
        if not (0.0 < self.refine_step_frac <= 0.5):
            raise ValueError("refine_step_frac must be in (0, 0.5]")
        if not (0 <= self.worst_reset_count < self.particle_count):
            raise ValueError(
                f"worst_reset_count must be in [0, particle_count), got "
                f"{self.worst_reset_count}"
            )
        for name in ("inertia", "cognitive", "social", "repulsion",
                     "v_max_frac", "v_init_frac"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.eval_budget is not None and self.eval_budget < 1:
            raise ValueError("eval_budget must be >= 1 when set")
        if self.symmetry_blocks is not None and self.symmetry_blocks < 1:
            raise ValueError("symmetry_blocks must be >= 1 when set")


@dataclass
class ConvergenceTrace:
    """Per-iteration best-so-far fitness, population mean, and eval count."""

    iterations: list[int] = field(default_factory=list)
    best_fitness: list[float] = field(default_factory=list)
    mean_fitness: list[float] = field(default_factory=list)
    evaluations: list[int] = field(default_factory=list)

    def append(self, iteration: int, best: float, mean: float, evals: int) -> None:
        if self.best_fitness and best > self.best_fitness[-1]:
            raise AssertionError(
                f"best fitness increased: {self.best_fitness[-1]} -> {best}"
            )
        self.iterations.append(iteration)
        self.best_fitness.append(best)
        self.mean_fitness.append(mean)
        self.evaluations.append(evals)

    def rows(self) -> list[tuple[int, float, float, int]]:
        return list(zip(self.iterations, self.best_fitness, self.mean_fitness,
                        self.evaluations))


@dataclass
class OptimizeResult:
    best_position: np.ndarray
    best_fitness: float
    report: object | None
    trace: ConvergenceTrace
    evaluations: int
    init_evaluations: int
    move_evaluations: int
    probe_evaluations: int
    refine_evaluations: int
    reset_evaluations: int


_LINE_EXPANSION_CAP = 24


class DirectionSet:
    """Per-particle adaptive direction set for personal-best refinement.

    Directions live in box-normalized space and start as the coordinate
    axes; after each full cycle the direction of largest single decrease is
    replaced by the cycle's net displacement (Powell's drop rule), which
    lets the set align with curved narrow valleys that axis moves cannot
    descend. Per-direction step fractions grow on success and shrink on
    failure, so the refiner needs no external schedule.
    """

    def __init__(self, bounds: SearchBounds, step_frac: float):
        dim = bounds.dim
        self.dirs = np.eye(dim)
        self.steps = np.full(dim, step_frac)
        self.cursor = 0
        self.cycle_start: np.ndarray | None = None
        self.gains = np.zeros(dim)
        self.init_frac = step_frac

    def state(self) -> tuple:
        return (self.dirs, self.steps, self.cursor, self.cycle_start,
                self.gains, self.init_frac)

    def restore(self, state: tuple) -> None:
        (self.dirs, self.steps, self.cursor, self.cycle_start,
         self.gains, self.init_frac) = state


def _line_minimize(x, f, direction, step_frac, width, lower, upper,
                   fitness_fn) -> tuple[np.ndarray, float, int, float, float]:
    """Minimize along +-direction with doubling steps while improving.

    Returns (x, f, evals, decrease, new_step_frac). The direction is in
    box-normalized units; the physical move is ``step * direction * width``.
    """
    move = direction * width
    f0 = f
    evals = 0
    step = step_frac
    for sign in (1.0, -1.0):
        probe = np.clip(x + sign * step * move, lower, upper)
        fp = fitness_fn(probe)
        evals += 1
        if fp < f:
            x, f = probe, fp
            for _ in range(_LINE_EXPANSION_CAP):
                step *= 2.0
                probe = np.clip(x + sign * step * move, lower, upper)
                fp = fitness_fn(probe)
                evals += 1
                if fp < f:
                    x, f = probe, fp
                else:
                    step *= 0.5
                    break
            return x, f, evals, f0 - f, min(step, 0.25)
    return x, f, evals, 0.0, max(step * 0.5, 1e-12)


def _refine_chain(x, f, state, n_lines, lower, upper, width, fitness_fn):
    """Run ``n_lines`` line minimizations, advancing the direction cycle.

    Pure function of its inputs (state is carried explicitly) so it can be
    dispatched to worker processes and reduced deterministically.
    """
    dirs, steps, cursor, cycle_start, gains, init_frac = state
    dirs = dirs.copy()
    steps = steps.copy()
    gains = gains.copy()
    x = np.asarray(x, dtype=float).copy()
    evals = 0
    dim = dirs.shape[0]
    for _ in range(n_lines):
        if cursor == 0:
            cycle_start = x.copy()
            gains[:] = 0.0
        x, f, used, gain, new_step = _line_minimize(
            x, f, dirs[cursor], steps[cursor], width, lower, upper, fitness_fn)
        evals += used
        gains[cursor] = gain
        steps[cursor] = new_step
        cursor += 1
        if cursor == dim:
            cursor = 0
            disp = (x - cycle_start) / width
            norm = math.sqrt(float(disp @ disp))
            if norm > 0.0:
                drop = int(np.argmax(gains))
                dirs[drop] = disp / norm
                steps[drop] = init_frac
    return x, f, (dirs, steps, cursor, cycle_start, gains, init_frac), evals


def initialize(bounds: SearchBounds, config: SwarmConfig,
               rng: np.random.Generator) -> list[Particle]:
    """Uniform positions in the box, small uniform velocities.

    Fitness fields start at +inf; the caller's first evaluation pass fills
    them and seeds the personal bests.
    """
    n = config.particle_count
    width = bounds.width
    positions = bounds.lower + rng.random((n, bounds.dim)) * width
    velocities = (2.0 * rng.random((n, bounds.dim)) - 1.0) * width * config.v_init_frac
    return [Particle(positions[i], velocities[i]) for i in range(n)]


def update_velocity(p: Particle, neighborhood_best: np.ndarray,
                    global_best: np.ndarray, bounds: SearchBounds,
                    config: SwarmConfig, rng: np.random.Generator) -> np.ndarray:
    """New velocity: inertia + cognitive + social + box-scaled perturbation.

    Draw order from the generator is pinned: r1, r2, r3 uniform [0, 1) per
    dimension, then the perturbation direction uniform [-1, 1) per dimension.
    ``global_best`` is part of the call contract but the update rule relies
    on the personal and neighborhood attractors plus the repulsive term.
    """
    del global_best
    dim = bounds.dim
    r1 = rng.random(dim)
    r2 = rng.random(dim)
    r3 = rng.random(dim)
    z = rng.uniform(-1.0, 1.0, dim) * bounds.width
    pbest = p.personal_best_position if p.personal_best_position is not None \
        else p.position
    v = (config.inertia * p.velocity
         + config.cognitive * r1 * (pbest - p.position)
         + config.social * r2 * (neighborhood_best - p.position)
         + config.repulsion * r3 * z)
    vmax = config.v_max_frac * bounds.width
    return np.clip(v, -vmax, vmax)


def align_symmetry_blocks(target: np.ndarray, reference: np.ndarray,
                          width: np.ndarray, blocks: int) -> np.ndarray:
    """Permute equivalent coordinate blocks of ``reference`` to best match
    ``target`` (box-normalized distances, exact assignment).

    When a fitness function is invariant under permuting identical blocks
    of the vector (one block per physical object here), attraction toward
    a neighbor is only meaningful after aligning the neighbor's blocks.
    """
    dim = target.size
    if blocks <= 1 or dim % blocks:
        return reference
    size = dim // blocks
    t = target.reshape(blocks, size)
    r = reference.reshape(blocks, size)
    w = width[:size]
    cost = [[float(np.sum(((t[i] - r[j]) / w) ** 2)) for j in range(blocks)]
            for i in range(blocks)]
    row_of = solve_lists(cost, blocks, blocks)
    return np.concatenate([r[row_of[i]] for i in range(blocks)])


def _probe_chain(x: np.ndarray, fitness: float, velocity: np.ndarray,
                 steps: int, lower: np.ndarray, upper: np.ndarray,
                 fitness_fn) -> tuple[np.ndarray, float, int]:
    """Directed probes along +-velocity with halving steps.

    Each step tries the forward probe first and the backward one only if the
    forward did not strictly improve; a strict improvement moves the particle.
    Returns the (possibly improved) position and fitness plus the number of
    fitness calls spent.
    """
    vmag = math.sqrt(float(velocity @ velocity))
    if steps <= 0 or vmag == 0.0 or not math.isfinite(vmag):
        return x, fitness, 0
    vhat = velocity / vmag
    evals = 0
    for s in range(1, steps + 1):
        delta = vmag / 2.0 ** (s - 1)
        for sign in (1.0, -1.0):
            probe = np.clip(x + sign * delta * vhat, lower, upper)
            f = fitness_fn(probe)
            evals += 1
            if f < fitness:
                x, fitness = probe, f
                break
    return x, fitness, evals


def local_search(p: Particle, fitness_fn, steps: int, bounds: SearchBounds,
                 rng: np.random.Generator | None = None) -> int:
    """Probe along +-velocity; keep strict improvements. Returns evals used.

    The schedule is deterministic (the rng parameter is accepted for call
    parity and unused).
    """
    del rng
    x, f, evals = _probe_chain(p.position, p.current_fitness, p.velocity,
                               steps, bounds.lower, bounds.upper, fitness_fn)
    p.position = x
    p.current_fitness = f
    return evals


def reset_worst(population: list[Particle], count: int, bounds: SearchBounds,
                rng: np.random.Generator, v_init_frac: float = 0.1) -> list[int]:
    """Re-seed the ``count`` worst particles uniformly; returns their indices.

    Worst means highest current fitness, ties broken by ascending index. The
    re-seeded particles get cleared personal bests (+inf) for the caller to
    fill with the fresh evaluation; redraws happen in ascending index order.
    """
    if count == 0:
        return []
    if count >= len(population):
        raise ValueError(f"cannot reset {count} of {len(population)} particles")
    order = sorted(range(len(population)),
                   key=lambda i: (-population[i].current_fitness, i))
    chosen = sorted(order[:count])
    width = bounds.width
    for i in chosen:
        p = population[i]
        p.position = bounds.lower + rng.random(bounds.dim) * width
        p.velocity = (2.0 * rng.random(bounds.dim) - 1.0) * width * v_init_frac
        p.current_fitness = math.inf
        p.personal_best_position = None
        p.personal_best_fitness = math.inf
    return chosen


def neighborhood(p_index: int, population: list[Particle], config: SwarmConfig,
                 bounds: SearchBounds | None = None,
                 rng: np.random.Generator | None = None) -> tuple[int, ...]:
    """Indices of the k neighbors of a particle (never including itself).

    closest: k nearest by box-normalized Euclidean distance (needs bounds);
    ring: k//2 on each side by index (one extra ahead when k is odd);
    random: k distinct uniform picks, to be re-drawn each iteration (needs rng).
    """
    n = len(population)
    k = config.neighborhood_size
    if not (0 <= p_index < n):
        raise ValueError(f"particle index {p_index} out of range")
    if k == 0:
        return ()
    if config.topology == "ring":
        half = k // 2
        back = [(p_index - o) % n for o in range(1, half + 1)]
        fwd = [(p_index + o) % n for o in range(1, k - half + 1)]
        return tuple(sorted(set(back + fwd)))
    if config.topology == "random":
        if rng is None:
            raise ValueError("random topology needs a generator")
        picks = rng.choice(n - 1, size=k, replace=False)
        return tuple(sorted(int(j + (j >= p_index)) for j in picks))
    if bounds is None:
        raise ValueError("closest topology needs bounds for normalization")
    width = bounds.width
    me = population[p_index].position
    dist = []
    for j, q in enumerate(population):
        if j == p_index:
            continue
        d = (q.position - me) / width
        dist.append((float(d @ d), j))
    dist.sort()
    return tuple(sorted(j for _, j in dist[:k]))


# -- worker-pool plumbing -------------------------------------------------

_WORKER_FITNESS = None


def _pool_initializer(fitness_fn) -> None:
    global _WORKER_FITNESS
    _WORKER_FITNESS = fitness_fn


def _pool_eval(x):
    return _WORKER_FITNESS(x)


def _pool_chain(args):
    x, f, v, steps, lower, upper = args
    return _probe_chain(x, f, v, steps, lower, upper, _WORKER_FITNESS)


def _pool_refine(args):
    x, f, state, n_lines, lower, upper, width = args
    return _refine_chain(x, f, state, n_lines, lower, upper, width,
                         _WORKER_FITNESS)


class _Runner:
    """Dispatches evaluation batches serially or over a process pool.

    Results are always reduced in submission (particle index) order, so the
    outcome is identical for any worker count.
    """

    def __init__(self, fitness_fn, workers: int):
        self.fitness_fn = fitness_fn
        self.pool = None
        if workers > 1:
            self.pool = ProcessPoolExecutor(
                max_workers=workers, initializer=_pool_initializer,
                initargs=(fitness_fn,))

    def eval_batch(self, positions) -> list[float]:
        if self.pool is None:
            return [self.fitness_fn(x) for x in positions]
        return list(self.pool.map(_pool_eval, positions))

    def chain_batch(self, chains) -> list[tuple[np.ndarray, float, int]]:
        if self.pool is None:
            return [_probe_chain(*args, self.fitness_fn) for args in chains]
        return list(self.pool.map(_pool_chain, chains))

    def refine_batch(self, chains):
        if self.pool is None:
            return [_refine_chain(*args, self.fitness_fn) for args in chains]
        return list(self.pool.map(_pool_refine, chains))

    def close(self) -> None:
        if self.pool is not None:
            self.pool.shutdown()


def optimize(fitness_fn, bounds: SearchBounds, config: SwarmConfig,
             workers: int = 1, callback=None,
             warm_start=None) -> OptimizeResult:
    """Minimize a total fitness function over the box.

    Parameters
    ----------
    fitness_fn : callable
        Maps a flattened position to a float, returning +inf rather than
        raising when a point cannot be scored. If it exposes a ``report``
        method (as :class:`~swarmtraj.fitness.CampaignEvaluator` does), the
        result carries the full report of the best position found.
    bounds : SearchBounds
        The search box; every evaluated position stays inside it.
    config : SwarmConfig
        Population size, iteration/evaluation budget, topology and weights.
    workers : int
        Process count for evaluation batches. Results are bit-identical for
        any value; with workers > 1 the fitness function must be picklable.
    callback : callable, optional
        Invoked once per trace row with (iteration, best, mean, evals).
    warm_start : array, optional
        Replaces particle 0's initial position (clipped to the box) before
        the first evaluation; the random draw sequence is unchanged.

    Returns
    -------
    OptimizeResult
        Best-ever position and fitness, optional report, convergence trace,
        and the evaluation accounting.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    rng = np.random.default_rng(config.seed)
    population = initialize(bounds, config, rng)
    if warm_start is not None:
        warm = np.clip(np.asarray(warm_start, dtype=float).reshape(-1),
                       bounds.lower, bounds.upper)
        if warm.size != bounds.dim:
            raise ValueError(
                f"warm start has {warm.size} dimensions, bounds have "
                f"{bounds.dim}"
            )
        population[0].position = warm
    n = config.particle_count
    steps = config.local_search_steps
    refiners = [DirectionSet(bounds, config.refine_step_frac)
                for _ in range(n)] if config.refine_lines else None
    # An iteration is atomic: it is skipped entirely if its worst-case cost
    # (moves + both probes per step + refinement lines + resets) could
    # overrun the budget.
    worst_case_iter = (n + 2 * steps * n
                       + config.refine_lines * (2 + _LINE_EXPANSION_CAP) * n
                       + config.worst_reset_count)
    budget = config.eval_budget

    counters = {"init": 0, "move": 0, "probe": 0, "refine": 0, "reset": 0}
    runner = _Runner(fitness_fn, workers)
    trace = ConvergenceTrace()
    try:
        for p, f in zip(population, runner.eval_batch([p.position for p in population])):
            p.current_fitness = f
            p.personal_best_position = p.position.copy()
            p.personal_best_fitness = f
        counters["init"] = n

        best_pos, best_fit = _best_of(population)
        trace.append(0, best_fit, _mean_fitness(population), n)
        if callback is not None:
            callback(trace.rows()[-1])

        ring_cache = None
        if config.topology == "ring":
            ring_cache = [neighborhood(i, population, config) for i in range(n)]

        for iteration in range(1, config.iteration_count + 1):
            spent = sum(counters.values())
            if budget is not None and spent + worst_case_iter > budget:
                break

            # Neighborhood bests from the current personal bests.
            if config.topology == "ring":
                hoods = ring_cache
            else:
                hoods = [neighborhood(i, population, config, bounds, rng)
                         for i in range(n)]
            nbest = []
            sym = config.symmetry_blocks
            for i, hood in enumerate(hoods):
                best_j = i
                for j in hood:
                    if population[j].personal_best_fitness \
                            < population[best_j].personal_best_fitness:
                        best_j = j
                attractor = population[best_j].personal_best_position
                if sym and sym > 1 and best_j != i:
                    attractor = align_symmetry_blocks(
                        population[i].position, attractor, bounds.width, sym)
                nbest.append(attractor)

            # Velocity draws consumed sequentially in particle order, before
            # any evaluation is dispatched.
            for i, p in enumerate(population):
                v = update_velocity(p, nbest[i], best_pos, bounds, config, rng)
                x = p.position + v
                below = x < bounds.lower
                above = x > bounds.upper
                x[below] = bounds.lower[below]
                x[above] = bounds.upper[above]
                v[below | above] = 0.0
                p.position = x
                p.velocity = v

            for p, f in zip(population,
                            runner.eval_batch([p.position for p in population])):
                p.current_fitness = f
            counters["move"] += n

            if steps > 0:
                chains = [(p.position, p.current_fitness, p.velocity, steps,
                           bounds.lower, bounds.upper) for p in population]
                for p, (x, f, used) in zip(population, runner.chain_batch(chains)):
                    p.position = x
                    p.current_fitness = f
                    counters["probe"] += used

            for p in population:
                if p.current_fitness < p.personal_best_fitness:
                    p.personal_best_fitness = p.current_fitness
                    p.personal_best_position = p.position.copy()

            if refiners is not None:
                chains = [(p.personal_best_position, p.personal_best_fitness,
                           refiners[i].state(), config.refine_lines,
                           bounds.lower, bounds.upper, bounds.width)
                          for i, p in enumerate(population)]
                for i, (x, f, state, used) in enumerate(
                        runner.refine_batch(chains)):
                    refiners[i].restore(state)
                    counters["refine"] += used
                    if f < population[i].personal_best_fitness:
                        population[i].personal_best_fitness = f
                        population[i].personal_best_position = x

            if config.worst_reset_count > 0:
                chosen = reset_worst(population, config.worst_reset_count,
                                     bounds, rng, config.v_init_frac)
                fresh = runner.eval_batch([population[i].position for i in chosen])
                for i, f in zip(chosen, fresh):
                    population[i].current_fitness = f
                    population[i].personal_best_fitness = f
                    population[i].personal_best_position = \
                        population[i].position.copy()
                    if refiners is not None:
                        refiners[i] = DirectionSet(bounds,
                                                   config.refine_step_frac)
                counters["reset"] += len(chosen)

            cand_pos, cand_fit = _best_of(population)
            if cand_fit < best_fit:
                best_pos, best_fit = cand_pos, cand_fit
            trace.append(iteration, best_fit, _mean_fitness(population),
                         sum(counters.values()))
            if callback is not None:
                callback(trace.rows()[-1])
    finally:
        runner.close()

    report = None
    if hasattr(fitness_fn, "report") and math.isfinite(best_fit):
        report = fitness_fn.report(best_pos)
    return OptimizeResult(
        best_position=best_pos.copy(),
        best_fitness=best_fit,
        report=report,
        trace=trace,
        evaluations=sum(counters.values()),
        init_evaluations=counters["init"],
        move_evaluations=counters["move"],
        probe_evaluations=counters["probe"],
        refine_evaluations=counters["refine"],
        reset_evaluations=counters["reset"],
    )


def _best_of(population: list[Particle]) -> tuple[np.ndarray, float]:
    best = 0
    for i in range(1, len(population)):
        if population[i].personal_best_fitness \
                < population[best].personal_best_fitness:
            best = i
    p = population[best]
    return p.personal_best_position.copy(), p.personal_best_fitness


def _mean_fitness(population: list[Particle]) -> float:
    total = 0.0
    for p in population:
        total += p.current_fitness
    return total / len(population)
