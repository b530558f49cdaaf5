"""Independent ground truth for P(Z=0), a Monte Carlo driver, and the
moment-generating-function gap verifier.

The exact oracles deliberately use different machinery than the bound
formulas (transfer matrices, binomial tails, exhaustive enumeration,
inclusion-exclusion) so they can anchor the bounds without sharing code
paths with them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Any

import numpy as np

from .family import ModelSpec
from .models import simulate_batch, trial_budget, trial_uniforms
from .numerics import ConfidenceInterval, LogProb, clopper_pearson

DEFAULT_SEED = 0xA55C1A7E  # documented constant so bare runs are reproducible


@dataclass(frozen=True)
class EstimateWithCI:
    """Monte Carlo estimate of P(Z=0) with an exact binomial interval."""

    estimate: float
    ci: ConfidenceInterval
    trials: int
    successes: int
    seed: int

    def __post_init__(self) -> None:
        if not self.ci.lower <= self.estimate <= self.ci.upper:
            raise ValueError("estimate must lie inside its confidence interval")

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "estimate": self.estimate,
            "ci": {
                "lower": self.ci.lower,
                "upper": self.ci.upper,
                "level": self.ci.level,
            },
            "trials": self.trials,
            "successes": self.successes,
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# k-runs: transfer matrix over trailing-run-length states.
# ---------------------------------------------------------------------------

def runs_zero_exact(n: int, k: int, p: float, circular: bool = True) -> LogProb:
    """Exact P(no k consecutive ones in a Bernoulli(p) string of length n).

    State s in {0..k-1} is the current trailing count of ones; a one moves
    s -> s+1 (reaching k is absorbing failure and is dropped), a zero resets
    to 0.  Linear strings sum the first row of M^n; circular strings take
    the trace, which sums over closed state walks and handles the seam.
    """
    if k < 1 or n < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if circular and n < k:
        raise ValueError(f"circular runs requires n >= k, got n={n}, k={k}")
    if not circular and n < k:
        return LogProb(0.0)

    m = np.zeros((k, k), dtype=np.float64)
    m[:, 0] = 1.0 - p
    for s in range(k - 1):
        m[s, s + 1] = p
    power = np.linalg.matrix_power(m, n)
    value = float(np.trace(power)) if circular else float(power[0, :].sum())
    return LogProb.from_linear(min(max(value, 0.0), 1.0))


# ---------------------------------------------------------------------------
# U-statistics: binomial tail.
# ---------------------------------------------------------------------------

def ustat_zero_exact(n: int, k: int, p: float) -> LogProb:
    """P(Z=0) = P(Binomial(n, p) <= k-1), in log domain.

    The complete U-statistic vanishes iff fewer than k of the underlying
    variables succeed.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return LogProb(0.0)
    terms = []
    log_p = math.log(p)
    log_q = math.log1p(-p) if p < 1.0 else None
    for j in range(k):
        if p == 1.0 and n - j > 0:
            continue
        lb = math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)
        terms.append(lb + j * log_p + (n - j) * log_q)
    if not terms:
        return LogProb(float("-inf"))
    hi = max(terms)
    return LogProb(hi + math.log(math.fsum(math.exp(t - hi) for t in terms)))


# ---------------------------------------------------------------------------
# Triangle-free probability: exhaustive over all graphs on n <= 7 vertices.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _triangle_free_counts(n: int) -> tuple[int, ...]:
    """counts[m] = number of triangle-free graphs on n labeled vertices with m edges."""
    n_edges = comb(n, 2)
    edges = list(combinations(range(n), 2))
    eidx = {e: i for i, e in enumerate(edges)}
    masks = np.arange(1 << n_edges, dtype=np.int64)
    bad = np.zeros(masks.shape, dtype=bool)
    for a, b, c in combinations(range(n), 3):
        t = (1 << eidx[(a, b)]) | (1 << eidx[(a, c)]) | (1 << eidx[(b, c)])
        bad |= (masks & t) == t
    popcounts = np.bitwise_count(masks.astype(np.uint64)).astype(np.int64)
    counts = np.bincount(popcounts[~bad], minlength=n_edges + 1)
    return tuple(int(c) for c in counts)


def triangle_free_exact(n: int, p: float) -> LogProb:
    """Exact P(G(n,p) contains no triangle), for 3 <= n <= 7.

    Counts triangle-free graphs per edge count by bitmask enumeration, then
    evaluates sum_m counts[m] p^m (1-p)^(M-m) in log-safe form.
    """
    if not 3 <= n <= 7:
        raise ValueError(f"exhaustive oracle supports 3 <= n <= 7, got n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    counts = _triangle_free_counts(n)
    n_edges = comb(n, 2)
    terms = []
    for m, c in enumerate(counts):
        if c == 0:
            continue
        if p == 0.0 and m > 0:
            continue
        if p == 1.0 and m < n_edges:
            continue
        lp = m * math.log(p) if m else 0.0
        lq = (n_edges - m) * math.log1p(-p) if n_edges - m else 0.0
        terms.append(math.log(c) + lp + lq)
    if not terms:
        return LogProb(float("-inf"))
    hi = max(terms)
    return LogProb(hi + math.log(math.fsum(math.exp(t - hi) for t in terms)))


# ---------------------------------------------------------------------------
# Coverage probability: inclusion-exclusion over edge subsets of K_N.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _cover_tables(N: int, k: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Per edge-subset S: count of k-subsets avoiding S, and parity of |S|."""
    n_edges = comb(N, 2)
    edges = list(combinations(range(N), 2))
    eidx = {e: i for i, e in enumerate(edges)}
    masks = np.arange(1 << n_edges, dtype=np.int64)
    avoid = np.zeros(masks.shape, dtype=np.int64)
    for w in combinations(range(N), k):
        wmask = 0
        for e in combinations(w, 2):
            wmask |= 1 << eidx[e]
        avoid += (masks & wmask) == 0
    parity = (np.bitwise_count(masks.astype(np.uint64)) & 1).astype(bool)
    return avoid, parity, comb(N, k)


def cover_all_exact(N: int, k: int, n_draws: int) -> LogProb:
    """Exact P(n_draws uniform k-cliques cover every edge of K_N), N <= 7.

    Inclusion-exclusion over edge subsets S: sum over S of
    (-1)^|S| (a(S)/C(N,k))^n_draws, where a(S) counts the k-subsets whose
    clique avoids S.  Terms alternate in sign, so the sum is taken with
    exact (fsum) accumulation in linear domain; magnitudes stay <= 1.
    """
    if not 2 <= k <= N:
        raise ValueError(f"need 2 <= k <= N, got N={N}, k={k}")
    if N > 7:
        raise ValueError(f"exhaustive oracle supports N <= 7, got N={N}")
    if n_draws < 1:
        raise ValueError(f"n_draws must be >= 1, got {n_draws}")
    avoid, parity, total = _cover_tables(N, k)
    powers = np.power(avoid / total, n_draws)
    signed = np.where(parity, -powers, powers)
    value = math.fsum(signed.tolist())
    if value < -1e-9:
        raise ArithmeticError(f"inclusion-exclusion produced {value} < 0")
    return LogProb.from_linear(min(max(value, 0.0), 1.0))


# ---------------------------------------------------------------------------
# Monte Carlo driver.
# ---------------------------------------------------------------------------

_BATCH_DOUBLES = 4_000_000


def _count_chunk(spec: ModelSpec, seed: int, start: int, stop: int) -> int:
    budget = trial_budget(spec)
    batch = max(1, min(stop - start, _BATCH_DOUBLES // max(budget, 1)))
    successes = 0
    i = start
    while i < stop:
        count = min(batch, stop - i)
        u = trial_uniforms(spec, seed, i, count)
        successes += int(simulate_batch(spec, u).sum())
        i += count
    return successes


def monte_carlo(
    spec: ModelSpec,
    trials: int,
    seed: int = DEFAULT_SEED,
    level: float = 0.95,
    workers: int = 1,
) -> EstimateWithCI:
    """Estimate P(Z=0) over `trials` counter-seeded trials.

    The success count is a sum over per-trial outcomes that depend only on
    (seed, trial_index), so the result is bit-identical for any worker count
    or batching schedule.
    """
    spec.ensure_valid()
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if workers == 1 or trials < 2 * workers:
        successes = _count_chunk(spec, seed, 0, trials)
    else:
        bounds_ = [round(w * trials / workers) for w in range(workers + 1)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_count_chunk, spec, seed, a, b)
                for a, b in zip(bounds_[:-1], bounds_[1:])
            ]
            successes = sum(f.result() for f in futures)
    estimate = successes / trials
    ci = clopper_pearson(successes, trials, level)
    return EstimateWithCI(
        estimate=estimate, ci=ci, trials=trials, successes=successes, seed=seed
    )


def oracle_for(spec: ModelSpec) -> LogProb | None:
    """Exact P(Z=0) for the given model spec, or None outside the exact range."""
    spec.ensure_valid()
    q = spec.params
    if spec.model == "runs":
        return runs_zero_exact(int(q["n"]), int(q["k"]), float(q["p"]))
    if spec.model == "ustat":
        return ustat_zero_exact(int(q["n"]), int(q["k"]), float(q["p"]))
    if spec.model == "triangles":
        if int(q["n"]) <= 7:
            return triangle_free_exact(int(q["n"]), float(q["p"]))
        return None
    if spec.model == "hypergraph-cover":
        if int(q["N"]) <= 7:
            return cover_all_exact(int(q["N"]), int(q["k"]), int(q["n_draws"]))
        return None
    raise ValueError(f"unknown model {spec.model!r}")


# ---------------------------------------------------------------------------
# Moment-generating-function gap verifier.
# ---------------------------------------------------------------------------

def mgf_gap_check(
    joint: np.ndarray | list[float], t: float, kappa: float = 1.0
) -> tuple[float, float, bool]:
    """Check |E e^{t sum X} - prod E e^{t X_i}| <= t^2 e^{m t kappa} sum Cov.

    ``joint`` is an explicit law over m binary variables given as 2^m atom
    probabilities (atom index = bitmask, bit i = value of variable i).
    Both sides are computed by exhaustive expectation; returns
    (gap, bound, holds) with holds allowing 1e-12 slack.
    """
    probs = np.asarray(joint, dtype=np.float64)
    size = probs.shape[0]
    m = size.bit_length() - 1
    if size != 1 << m or m < 1 or m > 20:
        raise ValueError(
            f"joint law must have 2^m atoms with 1 <= m <= 20, got {size}"
        )
    if abs(float(probs.sum()) - 1.0) > 1e-9 or (probs < -1e-12).any():
        raise ValueError("joint law must be a probability vector summing to 1")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")

    atoms = np.arange(size, dtype=np.uint64)
    bits = ((atoms[:, None] >> np.arange(m, dtype=np.uint64)) & 1).astype(
        np.float64
    )
    pops = bits.sum(axis=1)

    e_joint = float(probs @ np.exp(t * pops))
    marginals = probs @ bits
    per_var = 1.0 + (math.exp(t) - 1.0) * marginals
    e_product = float(np.prod(per_var))
    gap = abs(e_joint - e_product)

    second = bits.T @ (probs[:, None] * bits)
    cov = second - np.outer(marginals, marginals)
    cov_sum = float(np.triu(cov, k=1).sum())
    bound = t * t * math.exp(m * t * kappa) * cov_sum
    return gap, bound, gap <= bound + 1e-12


def random_monotone_joint(
    n_vars: int, n_bits: int, rng: np.random.Generator
) -> np.ndarray:
    """A random joint law of n_vars monotone threshold functions of n_bits
    independent Bernoulli bits; such variables are positively associated.

    Each variable is 1 iff a nonnegative weighted sum of the bits clears a
    random threshold.
    """
    if not 1 <= n_vars <= 16 or not 1 <= n_bits <= 12:
        raise ValueError("need 1 <= n_vars <= 16 and 1 <= n_bits <= 12")
    bit_p = rng.uniform(0.2, 0.8, size=n_bits)
    weights = rng.uniform(0.0, 1.0, size=(n_vars, n_bits))
    thresholds = rng.uniform(0.0, weights.sum(axis=1))

    atoms = np.arange(1 << n_bits, dtype=np.uint64)
    bits = ((atoms[:, None] >> np.arange(n_bits, dtype=np.uint64)) & 1).astype(
        np.float64
    )
    atom_probs = np.prod(np.where(bits == 1.0, bit_p, 1.0 - bit_p), axis=1)
    values = (bits @ weights.T >= thresholds).astype(np.int64)
    indices = (values << np.arange(n_vars, dtype=np.int64)).sum(axis=1)
    joint = np.zeros(1 << n_vars, dtype=np.float64)
    np.add.at(joint, indices, atom_probs)
    return joint
