"""Hard-core distributions on matchings.

A model is a multigraph plus a positive activity per edge; it induces
nu(M) proportional to the product of activities over M.  Partition functions
are evaluated in log domain by deletion-contraction, grouped per vertex

    Z(G) = Z(G - v) + sum_{e = vu} lambda(e) * Z(G - v - u),

memoized on live-vertex sets and factored over connected components.  Parallel
edges collapse into one simple edge whose activity is the bundle sum: the
collapsed partition function equals the multigraph one, and a sampled simple
edge lifts to a member of its bundle with probability proportional to the
member activity.

Sampling is a Metropolis chain over matchings of the collapsed graph with
insert / delete / slide proposals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CalibrationError, CapacityError, InfeasibleTargetError
from .graphs import Multigraph, distances_from, matched_vertices, require_matching
from .rng import stream

EXACT_CAP = 64  # collapsed simple-edge cap for exact partition functions
EXACT_SAMPLE_CAP = 20  # collapsed-edge cap for enumeration-based exact draws


class HardCoreModel:
    """A multigraph with one strictly positive, finite activity per edge."""

    def __init__(self, graph: Multigraph, activities: Mapping[int, float] | Sequence[float]):
        if isinstance(activities, Mapping):
            if set(activities) != set(range(graph.m)):
                raise ValueError("activities must cover exactly the edge ids of the graph")
            values = [float(activities[eid]) for eid in range(graph.m)]
        else:
            values = [float(x) for x in activities]
            if len(values) != graph.m:
                raise ValueError(f"expected {graph.m} activities, got {len(values)}")
        for eid, lam in enumerate(values):
            if not math.isfinite(lam) or lam <= 0.0:
                raise ValueError(f"activity for edge {eid} must be positive and finite, got {lam}")
        self.graph = graph
        self.activities: tuple[float, ...] = tuple(values)
        self._zcalc: _ZCalc | None = None
        self._collapse: _Collapse | None = None

    def zcalc(self) -> "_ZCalc":
        if self._zcalc is None:
            self._zcalc = _ZCalc(self)
        return self._zcalc

    def collapse(self) -> "_Collapse":
        if self._collapse is None:
            self._collapse = _Collapse(self)
        return self._collapse


class _Collapse:
    """Simple-graph view: one edge per vertex pair, activity = bundle sum."""

    def __init__(self, model: HardCoreModel):
        graph = model.graph
        bundles: dict[tuple[int, int], list[int]] = {}
        for eid, (u, v) in enumerate(graph.endpoints):
            key = (u, v) if u < v else (v, u)
            bundles.setdefault(key, []).append(eid)
        self.pairs: list[tuple[int, int]] = sorted(bundles)
        self.members: list[list[int]] = [bundles[p] for p in self.pairs]
        self.lam: list[float] = [
            sum(model.activities[eid] for eid in mem) for mem in self.members
        ]
        self.n = graph.n
        self.max_lam = max(self.lam, default=0.0)

    @property
    def m(self) -> int:
        return len(self.pairs)


def _logsumexp(values: list[float]) -> float:
    hi = max(values)
    if hi == -math.inf:
        return -math.inf
    return hi + math.log(sum(math.exp(v - hi) for v in values))


class _ZCalc:
    """Log partition functions over live-vertex subsets, memoized.

    Subsets travel as integer bitmasks internally, so membership tests, the
    component sweep and the memo keys all run on plain int arithmetic.
    """

    def __init__(self, model: HardCoreModel):
        collapse = model.collapse()
        self.nbr: list[list[tuple[int, float]]] = [[] for _ in range(collapse.n)]
        for (u, v), lam in zip(collapse.pairs, collapse.lam):
            loglam = math.log(lam)
            self.nbr[u].append((v, loglam))
            self.nbr[v].append((u, loglam))
        for lst in self.nbr:
            lst.sort()
        self.nbr_mask: list[int] = [0] * collapse.n
        for v, lst in enumerate(self.nbr):
            acc = 0
            for u, _ in lst:
                acc |= 1 << u
            self.nbr_mask[v] = acc
        self.memo: dict[int, float] = {}
        self.split_memo: dict[int, float] = {}

    @staticmethod
    def _mask_of(verts: Iterable[int]) -> int:
        acc = 0
        for v in verts:
            acc |= 1 << v
        return acc

    def simple_edges_within(self, verts: frozenset[int]) -> int:
        mask = self._mask_of(verts)
        return sum((self.nbr_mask[v] & mask).bit_count() for v in verts) // 2

    def log_z(self, verts: frozenset[int]) -> float:
        return self.log_z_mask(self._mask_of(verts))

    def log_z_mask(self, mask: int) -> float:
        if mask.bit_count() <= 1:
            return 0.0
        cached = self.split_memo.get(mask)
        if cached is not None:
            return cached
        total = 0.0
        for comp in self._components(mask):
            total += self._component_log_z(comp)
        self.split_memo[mask] = total
        return total

    def _components(self, mask: int) -> list[int]:
        remaining = mask
        comps = []
        while remaining:
            comp = remaining & -remaining
            new = comp
            while new:
                spread = 0
                bits = new
                while bits:
                    low = bits & -bits
                    spread |= self.nbr_mask[low.bit_length() - 1]
                    bits ^= low
                new = spread & remaining & ~comp
                comp |= new
            remaining &= ~comp
            comps.append(comp)
        return comps

    def _pivot(self, comp: int) -> int:
        # Pivot on a minimum-degree vertex: linear on trees, and it keeps the
        # reachable state family small on sparse graphs.
        best = -1
        best_deg = -1
        bits = comp
        while bits:
            low = bits & -bits
            v = low.bit_length() - 1
            deg = (self.nbr_mask[v] & comp).bit_count()
            if best < 0 or deg < best_deg:
                best, best_deg = v, deg
            bits ^= low
        return best

    def _component_log_z(self, comp: int) -> float:
        if comp.bit_count() <= 1:
            return 0.0
        cached = self.memo.get(comp)
        if cached is not None:
            return cached
        pivot = self._pivot(comp)
        rest = comp & ~(1 << pivot)
        terms = [self.log_z_mask(rest)]
        for u, loglam in self.nbr[pivot]:
            if comp >> u & 1:
                terms.append(loglam + self.log_z_mask(rest & ~(1 << u)))
        value = _logsumexp(terms)
        self.memo[comp] = value
        return value

    def sample(self, verts: frozenset[int], rng: np.random.Generator) -> list[tuple[int, int]]:
        """Exact matching draw on the live set, by walking the recursion.

        Each node's branch weights are the summands of its partition function,
        so descending with those probabilities samples the model exactly.
        Returns the matched vertex pairs, each sorted low-high.
        """
        chosen: list[tuple[int, int]] = []
        stack: list[int] = [self._mask_of(verts)]
        while stack:
            cur = stack.pop()
            if cur.bit_count() <= 1:
                continue
            comps = self._components(cur)
            if len(comps) > 1:
                stack.extend(reversed(comps))
                continue
            comp = comps[0]
            pivot = self._pivot(comp)
            rest = comp & ~(1 << pivot)
            opts: list[tuple[int | None, float]] = [(None, self.log_z_mask(rest))]
            for u, loglam in self.nbr[pivot]:
                if comp >> u & 1:
                    opts.append((u, loglam + self.log_z_mask(rest & ~(1 << u))))
            hi = max(w for _, w in opts)
            weights = [math.exp(w - hi) for _, w in opts]
            pick = rng.random() * sum(weights)
            acc = 0.0
            mate = opts[-1][0]
            for (cand, _), w in zip(opts, weights):
                acc += w
                if pick < acc:
                    mate = cand
                    break
            if mate is None:
                stack.append(rest)
            else:
                chosen.append((pivot, mate) if pivot < mate else (mate, pivot))
                stack.append(rest & ~(1 << mate))
        return chosen


def _check_cap(count: int, cap: int | None) -> None:
    limit = EXACT_CAP if cap is None else cap
    if count > limit:
        raise CapacityError(
            f"exact computation over {count} collapsed edges exceeds the cap of "
            f"{limit}; use the sampling path instead"
        )


def log_partition_function(model: HardCoreModel, cap: int | None = None) -> float:
    """log Z, where Z sums the activity products of all matchings (incl. empty)."""
    _check_cap(model.collapse().m, cap)
    calc = model.zcalc()
    return calc.log_z(frozenset(range(model.graph.n)))


def exact_marginals(model: HardCoreModel, cap: int | None = None) -> dict[int, float]:
    """Pr[e in M] = lambda(e) * Z(G - u - v) / Z(G) for every edge id."""
    _check_cap(model.collapse().m, cap)
    calc = model.zcalc()
    everything = (1 << model.graph.n) - 1
    log_z_all = calc.log_z_mask(everything)
    out: dict[int, float] = {}
    for eid, (u, v) in enumerate(model.graph.endpoints):
        drop = everything & ~(1 << u | 1 << v)
        log_num = math.log(model.activities[eid]) + calc.log_z_mask(drop)
        out[eid] = math.exp(log_num - log_z_all)
    return out


def exact_marginal(model: HardCoreModel, eid: int, cap: int | None = None) -> float:
    _check_cap(model.collapse().m, cap)
    calc = model.zcalc()
    everything = frozenset(range(model.graph.n))
    u, v = model.graph.endpoints[eid]
    log_num = math.log(model.activities[eid]) + calc.log_z(everything - {u, v})
    return math.exp(log_num - calc.log_z(everything))


def conditional_marginal(
    model: HardCoreModel,
    eid: int,
    frozen: Iterable[int],
    ball: Iterable[int],
    cap: int | None = None,
) -> float:
    """Marginal of ``eid`` in the compatibility subgraph induced on
    ``ball`` minus the endpoints of the frozen matching.

    Returns 0.0 when the edge is blocked (an endpoint saturated or outside the
    compatibility region).
    """
    graph = model.graph
    frozen_ids = require_matching(graph, frozen, label="frozen")
    ball_set = set(ball)
    u, v = graph.endpoints[eid]
    if u not in ball_set or v not in ball_set:
        raise ValueError(f"edge {eid} does not lie inside the ball")
    region = frozenset(ball_set - matched_vertices(graph, frozen_ids))
    if u not in region or v not in region:
        return 0.0
    calc = model.zcalc()
    _check_cap(calc.simple_edges_within(region), cap)
    log_num = math.log(model.activities[eid]) + calc.log_z(region - {u, v})
    return math.exp(log_num - calc.log_z(region))


# ---------------------------------------------------------------------------
# Sampling


@dataclass(frozen=True)
class ChainConfig:
    """Metropolis chain parameters.

    ``steps=None`` uses the budget 10 * m^2 * ceil(max(lambda', 1)) on the
    collapsed graph with m simple edges and maximum bundle activity lambda'.
    """

    steps: int | None = None
    seed: int = 0
    moves: tuple[float, float, float] = (0.4, 0.4, 0.2)

    def __post_init__(self):
        if self.steps is not None and self.steps < 0:
            raise ValueError("steps must be non-negative")
        if len(self.moves) != 3 or any(p <= 0 for p in self.moves):
            raise ValueError("moves must be three positive probabilities")
        if abs(sum(self.moves) - 1.0) > 1e-9:
            raise ValueError("move probabilities must sum to 1")


def default_steps(model: HardCoreModel) -> int:
    collapse = model.collapse()
    return 10 * collapse.m * collapse.m * max(1, math.ceil(max(collapse.max_lam, 1.0)))


def sample_matching(
    model: HardCoreModel,
    cfg: ChainConfig | None = None,
    rng: np.random.Generator | None = None,
    initial: Iterable[int] | None = None,
) -> frozenset[int]:
    """Approximate sample from the model via the Metropolis chain.

    The chain runs on the collapsed simple graph and the result is lifted to
    host edge ids.  ``initial`` (host edge ids) seeds the chain state.
    """
    cfg = cfg or ChainConfig()
    if rng is None:
        rng = stream(cfg.seed, "chain")
    collapse = model.collapse()
    ms = collapse.m
    if ms == 0:
        return frozenset()
    steps = cfg.steps if cfg.steps is not None else default_steps(model)

    pair_index = {pair: i for i, pair in enumerate(collapse.pairs)}
    in_m = [False] * ms
    partner = [-1] * collapse.n
    if initial is not None:
        host = require_matching(model.graph, initial, label="initial")
        for eid in host:
            a, b = model.graph.endpoints[eid]
            key = (a, b) if a < b else (b, a)
            s = pair_index[key]
            in_m[s] = True
            partner[a] = s
            partner[b] = s

    p_ins, p_del, _ = cfg.moves
    c1 = p_ins
    c2 = p_ins + p_del
    ratio_ins = p_del / p_ins
    ratio_del = p_ins / p_del
    lam = collapse.lam
    pairs = collapse.pairs

    done = 0
    batch = 8192
    while done < steps:
        k = min(batch, steps - done)
        done += k
        move_r = rng.random(k)
        picks = rng.integers(0, ms, size=k)
        accept_r = rng.random(k)
        for j in range(k):
            e = int(picks[j])
            u, v = pairs[e]
            r = move_r[j]
            if r < c1:  # insert
                if not in_m[e] and partner[u] < 0 and partner[v] < 0:
                    a = lam[e] * ratio_ins
                    if a >= 1.0 or accept_r[j] < a:
                        in_m[e] = True
                        partner[u] = e
                        partner[v] = e
            elif r < c2:  # delete
                if in_m[e]:
                    a = ratio_del / lam[e]
                    if a >= 1.0 or accept_r[j] < a:
                        in_m[e] = False
                        partner[u] = -1
                        partner[v] = -1
            else:  # slide
                if not in_m[e]:
                    pu, pv = partner[u], partner[v]
                    if (pu >= 0) != (pv >= 0):
                        f = pu if pu >= 0 else pv
                        a = lam[e] / lam[f]
                        if a >= 1.0 or accept_r[j] < a:
                            fu, fv = pairs[f]
                            in_m[f] = False
                            partner[fu] = -1
                            partner[fv] = -1
                            in_m[e] = True
                            partner[u] = e
                            partner[v] = e

    chosen: list[int] = []
    for e in range(ms):
        if not in_m[e]:
            continue
        members = collapse.members[e]
        if len(members) == 1:
            chosen.append(members[0])
            continue
        weights = [model.activities[eid] for eid in members]
        total = sum(weights)
        pick = rng.random() * total
        acc = 0.0
        for eid, w in zip(members, weights):
            acc += w
            if pick < acc:
                chosen.append(eid)
                break
        else:
            chosen.append(members[-1])
    return frozenset(chosen)


def _enumerate_matchings_of(endpoints: Sequence[tuple[int, int]]) -> list[list[int]]:
    out: list[list[int]] = []
    chosen: list[int] = []
    used: set[int] = set()

    def recurse(i: int) -> None:
        if i == len(endpoints):
            out.append(list(chosen))
            return
        u, v = endpoints[i]
        if u not in used and v not in used:
            chosen.append(i)
            used.add(u)
            used.add(v)
            recurse(i + 1)
            used.remove(u)
            used.remove(v)
            chosen.pop()
        recurse(i + 1)

    recurse(0)
    return out


def _enumerate_host_matchings(graph: Multigraph, allowed: Sequence[int]) -> list[list[int]]:
    ids = sorted(allowed)
    slots = _enumerate_matchings_of([graph.endpoints[e] for e in ids])
    return [[ids[i] for i in m] for m in slots]


def sample_matching_exact(
    model: HardCoreModel,
    rng: np.random.Generator,
    cap: int = EXACT_SAMPLE_CAP,
) -> frozenset[int]:
    """Exact draw by enumerating matchings of the collapsed view.

    Parallel edges are grouped per vertex pair before enumeration, so ``cap``
    bounds the number of distinct pairs; each pair picked by the draw is then
    thinned to one host edge in proportion to its activity.
    """
    collapse = model.collapse()
    if collapse.m > cap:
        raise CapacityError(
            f"exact draw supports at most {cap} collapsed edges, model has {collapse.m}"
        )
    matchings = _enumerate_matchings_of(collapse.pairs)
    weights = [math.prod(collapse.lam[s] for s in m) for m in matchings]
    total = sum(weights)
    pick = rng.random() * total
    acc = 0.0
    slots = matchings[-1]
    for m, w in zip(matchings, weights):
        acc += w
        if pick < acc:
            slots = m
            break
    return frozenset(_lift_bundle(model, collapse, s, rng) for s in slots)


def _lift_bundle(model: HardCoreModel, collapse: _Collapse, s: int, rng) -> int:
    """Thin a chosen bundle to one of its host edges, by activity weight."""
    members = collapse.members[s]
    if len(members) == 1:
        return members[0]
    sub = rng.random() * collapse.lam[s]
    acc = 0.0
    host = members[-1]
    for eid in members:
        acc += model.activities[eid]
        if sub < acc:
            host = eid
            break
    return host


def sample_matching_recursive(
    model: HardCoreModel,
    rng: np.random.Generator,
    cap: int | None = None,
) -> frozenset[int]:
    """Exact draw via the memoized partition-function recursion.

    Costs one recursion warm-up on first use and cheap walks after, so it
    replaces enumeration whenever the collapsed view fits the exact cap.
    Chosen pairs are thinned to host edges in proportion to their activities.
    """
    collapse = model.collapse()
    _check_cap(collapse.m, cap)
    calc = model.zcalc()
    pairs = calc.sample(frozenset(range(model.graph.n)), rng)
    index = {pair: s for s, pair in enumerate(collapse.pairs)}
    return frozenset(_lift_bundle(model, collapse, index[p], rng) for p in pairs)


def estimate_marginals(
    model: HardCoreModel,
    cfg: ChainConfig,
    samples: int,
    rng: np.random.Generator | None = None,
) -> dict[int, float]:
    """Per-edge occupancy frequencies over independent chain runs."""
    if samples <= 0:
        raise ValueError("samples must be positive")
    if rng is None:
        rng = stream(cfg.seed, "estimate")
    counts = [0] * model.graph.m
    for _ in range(samples):
        for eid in sample_matching(model, cfg, rng=rng):
            counts[eid] += 1
    return {eid: counts[eid] / samples for eid in range(model.graph.m)}


# ---------------------------------------------------------------------------
# Calibration


@dataclass
class CalibrationResult:
    activities: dict[int, float]
    achieved: dict[int, float]
    max_error: float
    iterations: int
    k_hat: float
    method: str
    converged: bool = True


def _as_fraction(x) -> Fraction:
    if isinstance(x, Rational):
        return Fraction(x)
    # Decimal reading of a float literal: 0.025 means 1/40, not its binary blob.
    return Fraction(str(x))


def calibrate_activities(
    graph: Multigraph,
    target,
    tol: float | None = None,
    max_iters: int = 500,
    chain: ChainConfig | None = None,
    samples: int = 400,
    exact_cap: int | None = None,
    rng: np.random.Generator | None = None,
    initial: Mapping[int, float] | None = None,
) -> CalibrationResult:
    """Iterative proportional fitting of activities to marginal targets.

    ``target`` is a single rational marginal for every edge, or a mapping from
    edge id to its target.  Updates are lambda <- lambda * (target/marginal)
    raised to a step size fit from the previous response on the exact path and
    damped by halving on the sampled path.  Marginals come from the exact path
    below the cap and from chain estimates above it.  ``initial`` warm-starts
    the activities (useful when recalibrating after small edits).
    """
    if graph.m == 0:
        return CalibrationResult({}, {}, 0.0, 0, 0.0, "exact")
    if isinstance(target, Mapping):
        targets = {eid: _as_fraction(t) for eid, t in target.items()}
        if set(targets) != set(range(graph.m)):
            raise ValueError("target mapping must cover exactly the edge ids")
        uniform = len(set(targets.values())) == 1
    else:
        t = _as_fraction(target)
        targets = {eid: t for eid in range(graph.m)}
        uniform = True
    for eid, t in targets.items():
        if not 0 < t < 1:
            raise ValueError(f"target for edge {eid} must lie in (0, 1), got {t}")

    if uniform:
        # Uniform marginals 1/c exist iff chi* < c (strictly inside the
        # matching polytope); the same bound certifies dominated targets.
        from .fractional import chi_star

        t_max = max(targets.values())
        value = chi_star(graph).value
        if value >= 1 / t_max:
            raise InfeasibleTargetError(
                f"marginal target {t_max} needs fractional chromatic index below "
                f"{1 / t_max}, but the graph has chi* = {value}; uniform marginals "
                "1/c are achievable exactly when chi* < c"
            )

    probe = HardCoreModel(graph, [1.0] * graph.m)
    exact = probe.collapse().m <= (EXACT_CAP if exact_cap is None else exact_cap)
    method = "exact" if exact else "mcmc"
    if tol is None:
        tol = 1e-6 if exact else 1e-2
    chain = chain or ChainConfig()
    if not exact and rng is None:
        rng = stream(chain.seed, "calibrate")

    tf = {eid: float(t) for eid, t in targets.items()}
    lam = {eid: tf[eid] / (1.0 - tf[eid]) for eid in range(graph.m)}
    if initial is not None:
        for eid, val in initial.items():
            if eid in lam and math.isfinite(val) and val > 0.0:
                lam[eid] = float(val)

    def marginals_of(acts: dict[int, float]) -> dict[int, float]:
        model = HardCoreModel(graph, acts)
        if exact:
            return exact_marginals(model, cap=exact_cap)
        return estimate_marginals(model, chain, samples, rng=rng)

    exponent = 1.0
    prev_err = math.inf
    prev_prev_err = math.inf
    best_lam = dict(lam)
    best_ach = None
    best_err = math.inf
    iterations = 0
    converged = False
    prev_applied: dict[int, float] = {}
    prev_logmu: dict[int, float] = {}
    logt = {eid: math.log(t) for eid, t in tf.items()}
    for iterations in range(1, max_iters + 1):
        ach = marginals_of(lam)
        logmu = {eid: math.log(max(ach[eid], 1e-300)) for eid in lam}
        err = max(abs(ach[eid] - tf[eid]) for eid in lam)
        if err < best_err:
            best_err = err
            best_lam = dict(lam)
            best_ach = ach
        if err <= tol:
            converged = True
            break
        if exact:
            # Raw updates overshoot near criticality (the map's gain exceeds
            # one), so fit the scalar gain from the previous step's response
            # and take the secant-sized step instead.
            if prev_applied:
                num = sum(
                    (logmu[eid] - prev_logmu[eid]) * prev_applied[eid] for eid in lam
                )
                den = sum(a * a for a in prev_applied.values())
                if den > 0.0 and num / den > 1e-3:
                    exponent = min(4.0, max(1.0 / 64.0, den / num))
        elif err > prev_err > prev_prev_err:
            exponent = max(exponent * 0.5, 1.0 / 64.0)
        prev_prev_err, prev_err = prev_err, err
        applied: dict[int, float] = {}
        for eid in lam:
            # Clamp to four e-folds per pass; a vanishing marginal would
            # otherwise request an overflowing jump in one step.
            step = min(4.0, max(-4.0, exponent * (logt[eid] - logmu[eid])))
            lam[eid] *= math.exp(step)
            applied[eid] = step
        prev_applied = applied
        prev_logmu = logmu

    k_hat = max(best_lam[eid] / tf[eid] for eid in best_lam)
    if best_ach is None:
        best_ach = marginals_of(best_lam)
    result = CalibrationResult(
        activities=best_lam,
        achieved=dict(best_ach),
        max_error=best_err,
        iterations=iterations,
        k_hat=k_hat,
        method=method,
        converged=converged,
    )
    if not converged:
        raise CalibrationError(
            f"calibration stalled at max error {best_err:.3g} after "
            f"{iterations} iterations (tol {tol:.3g})",
            best=result,
        )
    return result


# ---------------------------------------------------------------------------
# Correlation decay


def measure_correlation_decay(
    model: HardCoreModel,
    eid: int,
    t: int,
    trials: int,
    rng: np.random.Generator | None = None,
) -> float:
    """Max over sampled t-distant conditionings Q of |Pr[e in M | Q]/Pr[e in M] - 1|.

    A conditioning freezes the sampled matching outside the t-ball of e's
    endpoints (edges whose endpoints are both at distance >= t).  The
    conditional marginal is computed exactly on the completion subgraph: the
    vertices within distance t minus those saturated by Q, keeping only edges
    with at least one endpoint strictly inside the ball.
    """
    if t < 1:
        raise ValueError("conditioning distance t must be >= 1")
    if trials <= 0:
        raise ValueError("trials must be positive")
    if rng is None:
        rng = stream(0, "decay")
    graph = model.graph
    u0, v0 = graph.endpoints[eid]
    dist = distances_from(graph, (u0, v0))
    far = [
        f
        for f, (a, b) in enumerate(graph.endpoints)
        if (dist[a] >= t or dist[a] < 0) and (dist[b] >= t or dist[b] < 0)
    ]
    base = exact_marginal(model, eid)
    if not far:
        return 0.0

    far_set = set(far)
    exact_draw = graph.m <= EXACT_SAMPLE_CAP
    if exact_draw:
        # One enumeration serves every draw.
        matchings = _enumerate_host_matchings(graph, range(graph.m))
        weights = np.array(
            [math.prod(model.activities[f] for f in m) for m in matchings]
        )
        cum = np.cumsum(weights / weights.sum())
    worst = 0.0
    seen: set[frozenset[int]] = set()
    for _ in range(trials):
        if exact_draw:
            sample = matchings[int(np.searchsorted(cum, rng.random()))]
        else:
            sample = sample_matching(model, rng=rng)
        frozen = frozenset(f for f in sample if f in far_set)
        if frozen in seen:
            continue
        seen.add(frozen)
        blocked = matched_vertices(graph, frozen)
        region = [
            v for v in range(graph.n) if 0 <= dist[v] <= t and v not in blocked
        ]
        index = {v: i for i, v in enumerate(region)}
        sub_edges = []
        sub_lam = []
        new_eid = None
        for f, (a, b) in enumerate(graph.endpoints):
            if a in index and b in index and min(dist[a], dist[b]) <= t - 1:
                if f == eid:
                    new_eid = len(sub_edges)
                sub_edges.append((index[a], index[b]))
                sub_lam.append(model.activities[f])
        sub = HardCoreModel(Multigraph(len(region), sub_edges), sub_lam)
        assert new_eid is not None
        cond = exact_marginal(sub, new_eid)
        worst = max(worst, abs(cond / base - 1.0))
    return worst
