"""The four built-in indicator families: summaries and Monte Carlo samplers.

Each family ships in two formula variants:

  first-principles   exact pair enumeration (the default); covariances are
                     joint expectation minus product of means
  paper-as-printed   the published closed forms, which use one-sided pair
                     counts in places and substitute delta for the covariance
                     sum; kept so published numbers are reproducible

Samplers are pure functions of (seed, trial_index): every trial owns a fixed
block range of a Philox counter-based stream, so scalar evaluation, batched
evaluation, and any parallel split of the trial range produce bit-identical
results.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .family import FamilySummary, ModelSpec
from .numerics import NEG_INF, LogProb

FIRST_PRINCIPLES = "first-principles"
PAPER_AS_PRINTED = "paper-as-printed"
VARIANTS = (FIRST_PRINCIPLES, PAPER_AS_PRINTED)


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _check_prob(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")


# ---------------------------------------------------------------------------
# k-runs: windows of k consecutive successes in a Bernoulli string.
# ---------------------------------------------------------------------------

def runs_summary(
    n: int,
    k: int,
    p: float,
    variant: str = FIRST_PRINCIPLES,
    circular: bool = True,
) -> FamilySummary:
    """Summary for the k-runs family.

    Circular (default): n windows over a length-n string with wraparound,
    requiring n >= 2k so that window pairs overlap in at most one stretch.
    Two windows at circular offset d correlate iff d < k, with joint
    expectation p^(k+d); there are n unordered pairs at each offset.

    The printed variant halves the pair count (one neighbor per offset) and
    reuses delta as the covariance sum.

    Linear (circular=False): n windows over a string of length n+k-1, pairs
    summed directly; first-principles only.
    """
    _check_variant(variant)
    _check_prob(p)
    if k < 1:
        raise ValueError(f"runs requires k >= 1, got k={k}")
    if circular and n < 2 * k:
        raise ValueError(f"circular runs requires n >= 2k, got n={n}, k={k}")
    if not circular and n < 1:
        raise ValueError(f"linear runs requires n >= 1, got n={n}")
    if not circular and variant == PAPER_AS_PRINTED:
        raise ValueError("paper-as-printed runs formulas are circular only")

    mean = p**k
    offsets = range(1, k)
    if circular:
        pair_counts = {d: n for d in offsets}
    else:
        pair_counts = {d: max(n - d, 0) for d in offsets}

    joint = math.fsum(c * p ** (k + d) for d, c in pair_counts.items())
    if variant == PAPER_AS_PRINTED:
        delta = 0.5 * joint
        cov = delta
    else:
        delta = joint
        cov = math.fsum(
            c * (p ** (k + d) - p ** (2 * k)) for d, c in pair_counts.items()
        )
    return FamilySummary.homogeneous(count=n, p=mean, delta=delta, cov_sum=cov)


def runs_poisson_band(n: int, k: int, p: float) -> tuple[float, float]:
    """Poisson-approximation band for P(Z=0) in the runs family.

    Returns (center, radius): |P(Z=0) - exp(-n (1-p) p^k)| <= (2k(1-p)+1) p^k.
    """
    _check_prob(p)
    center = math.exp(-n * (1.0 - p) * p**k)
    radius = (2.0 * k * (1.0 - p) + 1.0) * p**k
    return center, radius


# ---------------------------------------------------------------------------
# Triangles in G(n, p).
# ---------------------------------------------------------------------------

def triangles_summary(
    n: int, p: float, variant: str = FIRST_PRINCIPLES
) -> FamilySummary:
    """Summary for the triangle-count family over C(n,3) vertex triples.

    Only edge-sharing triangle pairs are correlated (joint expectation p^5);
    each triangle shares an edge with exactly 3(n-3) others.  The printed
    variant uses 3n partners instead and reuses delta as the covariance sum.
    """
    _check_variant(variant)
    _check_prob(p)
    if n < 3:
        raise ValueError(f"triangles requires n >= 3, got n={n}")
    count = comb(n, 3)
    mean = p**3
    if variant == PAPER_AS_PRINTED:
        delta = 0.5 * count * (3 * n) * p**5
        cov = delta
    else:
        partners = 3 * (n - 3)
        delta = 0.5 * count * partners * p**5
        cov = 0.5 * count * partners * (p**5 - p**6)
    return FamilySummary.homogeneous(count=count, p=mean, delta=delta, cov_sum=cov)


# ---------------------------------------------------------------------------
# Complete U-statistics: products over k-subsets of n Bernoulli variables.
# ---------------------------------------------------------------------------

def ustat_summary(
    n: int, k: int, p: float, variant: str = FIRST_PRINCIPLES
) -> FamilySummary:
    """Summary for the complete U-statistic family over C(n,k) subsets.

    Two k-subsets sharing exactly m indices have joint expectation p^(2k-m);
    a fixed subset has C(k,m) C(n-k,k-m) partners with overlap m.  The
    printed variant drops the overlap-choice factor, using C(n-k,j) p^(k+j),
    and reuses delta as the covariance sum.
    """
    _check_variant(variant)
    _check_prob(p)
    if not 1 <= k <= n:
        raise ValueError(f"ustat requires 1 <= k <= n, got n={n}, k={k}")
    count = comb(n, k)
    mean = p**k
    if variant == PAPER_AS_PRINTED:
        delta = 0.5 * count * math.fsum(
            comb(n - k, j) * p ** (k + j) for j in range(1, k)
        )
        cov = delta
    else:
        delta = 0.5 * count * math.fsum(
            comb(k, m) * comb(n - k, k - m) * p ** (2 * k - m)
            for m in range(1, k)
        )
        cov = 0.5 * count * math.fsum(
            comb(k, m) * comb(n - k, k - m) * (p ** (2 * k - m) - p ** (2 * k))
            for m in range(1, k)
        )
    return FamilySummary.homogeneous(count=count, p=mean, delta=delta, cov_sum=cov)


# ---------------------------------------------------------------------------
# Hypergraph coverage: n_draws i.i.d. uniform k-cliques covering K_N.
# ---------------------------------------------------------------------------

def _hyper_check(N: int, k: int, n_draws: int) -> None:
    if not 2 <= k <= N:
        raise ValueError(f"hypergraph-cover requires 2 <= k <= N, got N={N}, k={k}")
    if n_draws < 1:
        raise ValueError(f"hypergraph-cover requires n_draws >= 1, got {n_draws}")


def _per_draw_avoid_single(N: int, k: int) -> Fraction:
    # P(one uniform k-subset does not contain a fixed edge)
    return 1 - Fraction(comb(N - 2, k - 2), comb(N, k))


def _per_draw_avoid_share(N: int, k: int) -> Fraction:
    # P(one draw contains neither of two edges sharing a vertex); the three
    # binomial terms split by how many of the three involved vertices the
    # draw picks up without completing an edge.
    c = comb(N, k)
    return Fraction(
        comb(N - 3, k) + 3 * comb(N - 3, k - 1) + comb(N - 3, k - 2), c
    )


def _per_draw_avoid_disjoint(N: int, k: int) -> Fraction:
    c = comb(N, k)
    return Fraction(
        comb(N - 4, k) + 4 * comb(N - 4, k - 1) + 4 * comb(N - 4, k - 2), c
    )


def hypergraph_edge_prob(N: int, k: int, n_draws: int) -> LogProb:
    """P(a fixed edge of K_N is uncovered after n_draws uniform k-cliques)."""
    _hyper_check(N, k, n_draws)
    a = _per_draw_avoid_single(N, k)
    if a == 0:
        return LogProb(NEG_INF)
    return LogProb(n_draws * math.log(float(a)))


def hypergraph_joint_probs(N: int, k: int, n_draws: int) -> tuple[LogProb, LogProb]:
    """P(both edges uncovered) for a vertex-sharing pair and a disjoint pair.

    Requires N >= 3 for the sharing pair; for N = 3 no disjoint pair exists
    and the disjoint probability is reported as zero.
    """
    _hyper_check(N, k, n_draws)
    if N < 3:
        raise ValueError(f"joint probabilities require N >= 3, got N={N}")

    def power(b: Fraction) -> LogProb:
        if b == 0:
            return LogProb(NEG_INF)
        return LogProb(n_draws * math.log(float(b)))

    q_share = power(_per_draw_avoid_share(N, k))
    if N < 4:
        q_disjoint = LogProb(NEG_INF)
    else:
        q_disjoint = power(_per_draw_avoid_disjoint(N, k))
    return q_share, q_disjoint


def _pair_cov(b_joint: Fraction, a_single: Fraction, n_draws: int) -> float:
    """b^n - a^(2n) without catastrophic cancellation.

    Written as a^(2n) * expm1(n * ln(b / a^2)); exact rationals keep the
    near-one ratio accurate, which matters when the two exponentials agree
    to ten digits.  May be negative: disjoint edge pairs are negatively
    correlated in this family.
    """
    if a_single == 0:
        return 0.0
    p2 = math.exp(2 * n_draws * math.log(float(a_single)))
    if b_joint == 0:
        return -p2
    ratio = b_joint / (a_single * a_single)
    return p2 * math.expm1(n_draws * math.log(float(ratio)))


def hypergraph_summary(N: int, k: int, n_draws: int) -> FamilySummary:
    """Summary for the coverage family over the C(N,2) edges of K_N.

    Every pair of edges is correlated: each edge has 2(N-2) vertex-sharing
    partners and C(N-2,2) disjoint ones, giving C(N,2)(N-2) unordered
    sharing pairs and C(N,2) C(N-2,2)/2 disjoint pairs.  Covariances are
    computed exactly; the disjoint ones are negative (two disjoint edges can
    only compete for draws), so cov_sum itself can be negative, in which
    case the family is not positively associated and the additive bounds
    refuse to run.
    """
    _hyper_check(N, k, n_draws)
    if N < 4:
        raise ValueError(f"hypergraph summary requires N >= 4, got N={N}")
    count = comb(N, 2)
    a = _per_draw_avoid_single(N, k)
    b_s = _per_draw_avoid_share(N, k)
    b_d = _per_draw_avoid_disjoint(N, k)

    p = hypergraph_edge_prob(N, k, n_draws).linear
    q_s, q_d = hypergraph_joint_probs(N, k, n_draws)

    share_pairs = count * (N - 2)
    disjoint_pairs = count * comb(N - 2, 2) // 2

    delta = share_pairs * q_s.linear + disjoint_pairs * q_d.linear
    cov = share_pairs * _pair_cov(b_s, a, n_draws) + disjoint_pairs * _pair_cov(
        b_d, a, n_draws
    )
    return FamilySummary.homogeneous(count=count, p=p, delta=delta, cov_sum=cov)


def summary_for(spec: ModelSpec, variant: str = FIRST_PRINCIPLES) -> FamilySummary:
    """Build the FamilySummary for a validated ModelSpec."""
    spec.ensure_valid()
    q = spec.params
    if spec.model == "runs":
        return runs_summary(int(q["n"]), int(q["k"]), float(q["p"]), variant)
    if spec.model == "triangles":
        return triangles_summary(int(q["n"]), float(q["p"]), variant)
    if spec.model == "ustat":
        return ustat_summary(int(q["n"]), int(q["k"]), float(q["p"]), variant)
    if spec.model == "hypergraph-cover":
        # No printed/first-principles split here: delta and covariances come
        # straight from the exact joint-probability formulas.
        return hypergraph_summary(int(q["N"]), int(q["k"]), int(q["n_draws"]))
    raise ValueError(f"unknown model {spec.model!r}")


# ---------------------------------------------------------------------------
# Counter-based sampling.
# ---------------------------------------------------------------------------

def trial_budget(spec: ModelSpec) -> int:
    """Uniform doubles consumed per trial (fixed per spec, never data-dependent)."""
    q = spec.params
    if spec.model == "runs":
        return int(q["n"])
    if spec.model == "ustat":
        return int(q["n"])
    if spec.model == "triangles":
        return comb(int(q["n"]), 2)
    if spec.model == "hypergraph-cover":
        return int(q["n_draws"]) * int(q["k"])
    raise ValueError(f"unknown model {spec.model!r}")


def _blocks_per_trial(spec: ModelSpec) -> int:
    # Philox emits 4 uint64 words per counter value; each uniform double
    # consumes one word, so pad the per-trial budget to a whole block count.
    return max(1, -(-trial_budget(spec) // 4))


def trial_uniforms(
    spec: ModelSpec, seed: int, start: int, count: int
) -> np.ndarray:
    """Uniforms for trials [start, start+count), shape (count, budget).

    Trial i reads words [i*4*bpt, i*4*bpt + budget) of the Philox stream
    keyed by the seed, so any batching or parallel split reproduces the
    per-trial values exactly.
    """
    bpt = _blocks_per_trial(spec)
    budget = trial_budget(spec)
    bg = np.random.Philox(key=seed, counter=start * bpt)
    raw = np.random.Generator(bg).random(count * bpt * 4)
    return raw.reshape(count, bpt * 4)[:, :budget]


def _run_in_row(bits: np.ndarray, k: int) -> np.ndarray:
    """Row-wise: does the circular 0/1 row contain k consecutive ones?"""
    n = bits.shape[1]
    ext = np.concatenate([bits, bits[:, : k - 1]], axis=1) if k > 1 else bits
    cs = np.cumsum(ext, axis=1, dtype=np.int64)
    zero = np.zeros((bits.shape[0], 1), dtype=np.int64)
    cs = np.concatenate([zero, cs], axis=1)
    window = cs[:, k:] - cs[:, :-k]
    return (window[:, :n] == k).any(axis=1)


_TRIANGLE_CACHE: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _triangle_edge_indices(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if n not in _TRIANGLE_CACHE:
        edges = list(combinations(range(n), 2))
        eidx = {e: i for i, e in enumerate(edges)}
        t0, t1, t2 = [], [], []
        for a, b, c in combinations(range(n), 3):
            t0.append(eidx[(a, b)])
            t1.append(eidx[(a, c)])
            t2.append(eidx[(b, c)])
        _TRIANGLE_CACHE[n] = (np.array(t0), np.array(t1), np.array(t2))
    return _TRIANGLE_CACHE[n]


_EDGE_TABLE_CACHE: dict[int, np.ndarray] = {}


def _edge_table(N: int) -> np.ndarray:
    if N not in _EDGE_TABLE_CACHE:
        table = np.zeros((N, N), dtype=np.int64)
        for i, (a, b) in enumerate(combinations(range(N), 2)):
            table[a, b] = i
            table[b, a] = i
        _EDGE_TABLE_CACHE[N] = table
    return _EDGE_TABLE_CACHE[N]


def simulate_batch(spec: ModelSpec, uniforms: np.ndarray) -> np.ndarray:
    """Map per-trial uniforms to the event {Z = 0}, vectorized over rows.

    For hypergraph-cover the event is full coverage of K_N.
    """
    q = spec.params
    if spec.model == "runs":
        k, p = int(q["k"]), float(q["p"])
        bits = (uniforms < p).astype(np.int8)
        return ~_run_in_row(bits, k)
    if spec.model == "ustat":
        k, p = int(q["k"]), float(q["p"])
        ones = (uniforms < p).sum(axis=1)
        return ones <= k - 1
    if spec.model == "triangles":
        p = float(q["p"])
        edges = uniforms < p
        t0, t1, t2 = _triangle_edge_indices(int(q["n"]))
        has_triangle = (edges[:, t0] & edges[:, t1] & edges[:, t2]).any(axis=1)
        return ~has_triangle
    if spec.model == "hypergraph-cover":
        N, k, n_draws = int(q["N"]), int(q["k"]), int(q["n_draws"])
        batch = uniforms.shape[0]
        n_edges = comb(N, 2)
        table = _edge_table(N)
        covered = np.zeros((batch, n_edges), dtype=bool)
        rows = np.arange(batch)
        pairs = list(combinations(range(k), 2))
        for r in range(n_draws):
            u = uniforms[:, r * k : (r + 1) * k]
            # partial Fisher-Yates: k selection steps, one uniform each
            perm = np.tile(np.arange(N, dtype=np.int64), (batch, 1))
            for j in range(k):
                idx = j + (u[:, j] * (N - j)).astype(np.int64)
                np.minimum(idx, N - 1, out=idx)
                chosen_vals = perm[rows, idx]
                perm[rows, idx] = perm[:, j]
                perm[:, j] = chosen_vals
            for a, b in pairs:
                covered[rows, table[perm[:, a], perm[:, b]]] = True
            if covered.all():
                break
        return covered.all(axis=1)
    raise ValueError(f"unknown model {spec.model!r}")


def sample_is_zero(spec: ModelSpec, rng_seed: int, trial_index: int) -> bool:
    """One realization: True iff Z = 0 (full coverage for hypergraph-cover).

    Deterministic given (rng_seed, trial_index); trials are independently
    positioned in a counter-based stream, so any parallel schedule yields
    identical results.
    """
    spec.ensure_valid()
    u = trial_uniforms(spec, rng_seed, trial_index, 1)
    return bool(simulate_batch(spec, u)[0])
