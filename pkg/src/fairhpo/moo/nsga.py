"""NSGA-II and NSGA-III over [0,1]^k genotypes with full evaluation
archives.

Evaluators receive per-individual contexts carrying a seed derived as
sha256(master seed, generation, index), so objective evaluations may run in
parallel without changing results; every evaluation lands in the archive in
deterministic (generation, index) order and the run stops exactly when the
evaluation budget is consumed.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from fairhpo.moo.pareto import (crowding_distance, non_dominated_sort,
                                pareto_front_indices, ranks_of)
from fairhpo.space import polynomial_mutation, sbx_crossover

DEFAULT_ETA_C = 15.0
DEFAULT_ETA_M = 20.0
DEFAULT_P_CX = 0.9


def derive_eval_seed(master_seed: int, gen: int, index: int) -> int:
    """Platform-stable per-evaluation seed."""
    digest = hashlib.sha256(f"{master_seed}:{gen}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass(frozen=True)
class EvalContext:
    gen: int
    index: int
    eval_id: int
    seed: int


@dataclass(frozen=True)
class EvalRecord:
    eval_id: int
    gen: int
    genotype: np.ndarray
    objectives: np.ndarray


@dataclass
class Archive:
    n_var: int
    objective_names: tuple[str, ...]
    records: list[EvalRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def n_obj(self) -> int:
        return len(self.objective_names)

    def objectives_matrix(self) -> np.ndarray:
        return np.array([r.objectives for r in self.records], dtype=np.float64)

    def genotypes_matrix(self) -> np.ndarray:
        return np.array([r.genotype for r in self.records], dtype=np.float64)

    def front_records(self) -> list[EvalRecord]:
        idx = pareto_front_indices(self.objectives_matrix())
        return [self.records[i] for i in idx]


Evaluator = Callable[[np.ndarray, Sequence[EvalContext]], np.ndarray]
GenerationHook = Callable[[int, list[EvalRecord]], None]


@dataclass(frozen=True)
class ReferenceDirectionSet:
    directions: np.ndarray
    partitions: int

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=np.float64)
        dirs.setflags(write=False)
        object.__setattr__(self, "directions", dirs)

    def __len__(self) -> int:
        return self.directions.shape[0]


def das_dennis(n_obj: int, partitions: int) -> ReferenceDirectionSet:
    """All compositions of `partitions` into n_obj parts, divided by
    `partitions`: C(partitions + n_obj - 1, n_obj - 1) simplex points."""
    if n_obj < 2 or partitions < 1:
        raise ValueError("need n_obj >= 2 and partitions >= 1")
    dirs = []
    for cuts in combinations(range(partitions + n_obj - 1), n_obj - 1):
        prev = -1
        comp = []
        for c in cuts:
            comp.append(c - prev - 1)
            prev = c
        comp.append(partitions + n_obj - 2 - prev)
        dirs.append(comp)
    directions = np.array(dirs, dtype=np.float64) / partitions
    return ReferenceDirectionSet(directions=directions, partitions=partitions)


def default_partitions(n_obj: int, pop: int) -> int:
    """Largest p with C(p + n_obj - 1, n_obj - 1) <= pop (at least 1)."""
    p = 1
    while math.comb(p + n_obj, n_obj - 1) <= pop:
        p += 1
    return p


class _RunState:
    """Shared bookkeeping: budget, archive, per-generation flush hook."""

    def __init__(self, evaluator: Evaluator, n_var: int, max_evals: int,
                 master_seed: int, on_generation: GenerationHook | None):
        self.evaluator = evaluator
        self.n_var = n_var
        self.max_evals = max_evals
        self.master_seed = master_seed
        self.on_generation = on_generation
        self.archive: Archive | None = None
        self.eval_count = 0

    @property
    def remaining(self) -> int:
        return self.max_evals - self.eval_count

    def evaluate(self, genotypes: np.ndarray, gen: int) -> np.ndarray:
        ctxs = [EvalContext(gen=gen, index=i, eval_id=self.eval_count + i,
                            seed=derive_eval_seed(self.master_seed, gen, i))
                for i in range(genotypes.shape[0])]
        objs = np.asarray(self.evaluator(genotypes, ctxs), dtype=np.float64)
        if objs.shape[0] != genotypes.shape[0]:
            raise ValueError("evaluator returned wrong number of rows")
        if self.archive is None:
            names = tuple(f"f{j}" for j in range(objs.shape[1]))
            self.archive = Archive(n_var=self.n_var, objective_names=names)
        batch = [EvalRecord(eval_id=c.eval_id, gen=gen,
                            genotype=genotypes[i].copy(), objectives=objs[i].copy())
                 for i, c in enumerate(ctxs)]
        self.archive.records.extend(batch)
        self.eval_count += len(batch)
        if self.on_generation is not None:
            self.on_generation(gen, batch)
        return objs


def _make_offspring(parents: np.ndarray, parent_picks: np.ndarray, n_off: int,
                    rng: np.random.Generator, eta_c: float, eta_m: float,
                    p_cx: float, p_m: float) -> np.ndarray:
    children = []
    for a_idx, b_idx in parent_picks:
        c1, c2 = sbx_crossover(parents[a_idx], parents[b_idx], eta_c, p_cx, rng)
        children.append(polynomial_mutation(c1, eta_m, p_m, rng))
        children.append(polynomial_mutation(c2, eta_m, p_m, rng))
    return np.array(children[:n_off])


def _tournament_pick(rank: np.ndarray, crowd: np.ndarray,
                     rng: np.random.Generator) -> int:
    i, j = rng.integers(0, rank.size, size=2)
    if rank[i] != rank[j]:
        return int(i if rank[i] < rank[j] else j)
    if crowd[i] != crowd[j]:
        return int(i if crowd[i] > crowd[j] else j)
    return int(i)  # full tie: first sampled candidate


def run_nsga2(evaluator: Evaluator, n_var: int, pop: int, max_evals: int,
              seed: int, eta_c: float = DEFAULT_ETA_C, eta_m: float = DEFAULT_ETA_M,
              p_cx: float = DEFAULT_P_CX, p_m: float | None = None,
              on_generation: GenerationHook | None = None) -> Archive:
    """Elitist NSGA-II: binary tournament on (rank, crowding), SBX +
    polynomial mutation, rank/crowding survivor selection."""
    if pop < 2 or pop % 2:
        raise ValueError("pop must be even and >= 2")
    if max_evals < pop:
        raise ValueError("max_evals must cover the initial population")
    p_m = 1.0 / n_var if p_m is None else p_m
    rng = np.random.default_rng(seed)
    state = _RunState(evaluator, n_var, max_evals, seed, on_generation)

    P = rng.random((pop, n_var))
    P_obj = state.evaluate(P, gen=0)

    gen = 0
    while state.remaining > 0:
        gen += 1
        n_off = min(pop, state.remaining)
        rank = ranks_of(P_obj)
        crowd = np.empty(pop)
        for front in non_dominated_sort(P_obj):
            crowd[front] = crowding_distance(P_obj[front])
        picks = np.array([[_tournament_pick(rank, crowd, rng),
                           _tournament_pick(rank, crowd, rng)]
                          for _ in range((n_off + 1) // 2)])
        Q = _make_offspring(P, picks, n_off, rng, eta_c, eta_m, p_cx, p_m)
        Q_obj = state.evaluate(Q, gen=gen)

        R = np.vstack([P, Q])
        R_obj = np.vstack([P_obj, Q_obj])
        keep: list[int] = []
        for front in non_dominated_sort(R_obj):
            if len(keep) + front.size <= pop:
                keep.extend(front.tolist())
            else:
                cd = crowding_distance(R_obj[front])
                order = np.lexsort((front, -cd))  # crowding desc, index asc
                keep.extend(front[order][: pop - len(keep)].tolist())
                break
        P = R[keep]
        P_obj = R_obj[keep]

    return state.archive


def _nsga3_normalize(objs: np.ndarray) -> np.ndarray:
    """Adaptive ideal/nadir normalization with degenerate guards."""
    ideal = objs.min(axis=0)
    t = objs - ideal
    d = objs.shape[1]
    w = np.full((d, d), 1e-6) + np.eye(d)
    extreme = np.array([int(np.argmin(np.max(t / w[i], axis=1))) for i in range(d)])
    intercepts = None
    try:
        plane = np.linalg.solve(t[extreme], np.ones(d))
        if np.all(plane > 1e-12) and np.all(np.isfinite(plane)):
            intercepts = 1.0 / plane
    except np.linalg.LinAlgError:
        intercepts = None
    if intercepts is None:
        intercepts = t.max(axis=0)
    intercepts = np.where(intercepts > 1e-12, intercepts, 1.0)
    return t / intercepts


def _associate(normed: np.ndarray, dirs: np.ndarray):
    """Perpendicular distance of each point to each unit direction line."""
    unit = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    proj = normed @ unit.T  # (n, ndir) scalar projections
    sq = np.sum(normed * normed, axis=1, keepdims=True)
    perp = np.sqrt(np.maximum(sq - proj * proj, 0.0))
    niche = np.argmin(perp, axis=1)
    dist = perp[np.arange(normed.shape[0]), niche]
    return niche, dist


def _niching_select(need: int, niche_counts: np.ndarray, niche: np.ndarray,
                    dist: np.ndarray, candidates: np.ndarray,
                    rng: np.random.Generator) -> list[int]:
    """Fill `need` slots from `candidates` (indices into niche/dist arrays),
    repeatedly taking from the least-occupied reference direction."""
    chosen: list[int] = []
    available = set(candidates.tolist())
    active = np.ones(niche_counts.size, dtype=bool)
    while len(chosen) < need:
        live = np.flatnonzero(active)
        jmin = live[niche_counts[live] == niche_counts[live].min()]
        j = int(jmin[rng.integers(0, jmin.size)]) if jmin.size > 1 else int(jmin[0])
        members = sorted(c for c in available if niche[c] == j)
        if not members:
            active[j] = False
            continue
        if niche_counts[j] == 0:
            members.sort(key=lambda c: (dist[c], c))
            pick = members[0]
        else:
            pick = members[int(rng.integers(0, len(members)))]
        chosen.append(pick)
        available.remove(pick)
        niche_counts[j] += 1
    return chosen


def run_nsga3(evaluator: Evaluator, n_var: int, pop: int,
              ref_dirs: ReferenceDirectionSet, max_evals: int, seed: int,
              eta_c: float = DEFAULT_ETA_C, eta_m: float = DEFAULT_ETA_M,
              p_cx: float = DEFAULT_P_CX, p_m: float | None = None,
              on_generation: GenerationHook | None = None) -> Archive:
    """NSGA-III: rank-based survival with ideal/nadir normalization,
    perpendicular association to reference directions, and niche-count
    selection from the partial front. Mating parents are drawn uniformly."""
    if pop < 2 or pop % 2:
        raise ValueError("pop must be even and >= 2")
    if max_evals < pop:
        raise ValueError("max_evals must cover the initial population")
    p_m = 1.0 / n_var if p_m is None else p_m
    rng = np.random.default_rng(seed)
    state = _RunState(evaluator, n_var, max_evals, seed, on_generation)
    dirs = ref_dirs.directions

    P = rng.random((pop, n_var))
    P_obj = state.evaluate(P, gen=0)

    gen = 0
    while state.remaining > 0:
        gen += 1
        n_off = min(pop, state.remaining)
        picks = rng.integers(0, pop, size=((n_off + 1) // 2, 2))
        Q = _make_offspring(P, picks, n_off, rng, eta_c, eta_m, p_cx, p_m)
        Q_obj = state.evaluate(Q, gen=gen)

        R = np.vstack([P, Q])
        R_obj = np.vstack([P_obj, Q_obj])
        fronts = non_dominated_sort(R_obj)
        keep: list[int] = []
        last_front: np.ndarray | None = None
        for front in fronts:
            if len(keep) + front.size <= pop:
                keep.extend(front.tolist())
            else:
                last_front = front
                break
        need = pop - len(keep)
        if last_front is not None and need > 0:
            considered = np.array(keep + last_front.tolist(), dtype=np.int64)
            normed = _nsga3_normalize(R_obj[considered])
            niche, dist = _associate(normed, dirs)
            pos_of = {int(r): i for i, r in enumerate(considered)}
            counts = np.zeros(len(dirs), dtype=np.int64)
            for r in keep:
                counts[niche[pos_of[r]]] += 1
            cand_pos = np.array([pos_of[int(r)] for r in last_front])
            picks_pos = _niching_select(need, counts, niche, dist, cand_pos, rng)
            keep.extend(int(considered[p]) for p in picks_pos)
        P = R[keep]
        P_obj = R_obj[keep]

    return state.archive
