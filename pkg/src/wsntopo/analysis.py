"""Degree-distribution analytics and random-failure robustness sweeps.

The theoretical degree curve comes from the mean-field treatment of the
energy-weighted attachment rule: a node with energy E grows its degree like
``k(t) = m (t/t_i)^beta`` with ``beta = E / (2 * mean_energy)``, giving a
per-energy density ``(1/beta) m^(1/beta) k^-(1 + 1/beta)`` for k >= m.
Mixing that density over the (uniform) energy distribution yields the
network-wide P(k); with all energies equal it collapses to the pure
``2 m^2 k^-3`` power law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.special import zeta

from .errors import AnalysisError, ConfigError, FitError
from .graph import Graph
from .rng import sample_indices, substream

__all__ = [
    "DegreeHistogram",
    "TheoreticalModel",
    "RobustnessCurve",
    "degree_stats",
    "degree_histogram",
    "theoretical_pk",
    "theoretical_bin_pmf",
    "ks_distance_to_theory",
    "fit_power_law_exponent",
    "fit_power_law_tail",
    "giant_components",
    "random_failure_sweep",
]


def degree_stats(g: Graph) -> tuple[float, int, int]:
    """(average, min, max) of the graph's declared degree view."""
    if g.node_count == 0:
        raise AnalysisError("degree stats on an empty graph")
    d = g.degrees()
    return float(d.mean()), int(d.min()), int(d.max())


@dataclass(frozen=True)
class DegreeHistogram:
    """Empirical degree pmf on 0..k_max plus its complementary CDF."""

    ks: np.ndarray
    pmf: np.ndarray
    ccdf: np.ndarray  # ccdf[i] = P(K >= ks[i])

    def restricted(self, k_min: int) -> "DegreeHistogram":
        """Renormalized histogram over k >= k_min."""
        sel = self.ks >= k_min
        mass = self.pmf[sel].sum()
        if mass <= 0:
            raise AnalysisError(f"no degree mass at k >= {k_min}")
        pmf = self.pmf[sel] / mass
        ccdf = np.cumsum(pmf[::-1])[::-1]
        return DegreeHistogram(ks=self.ks[sel], pmf=pmf, ccdf=ccdf)

    def log_binned(self, bins_per_decade: int = 5) -> list[tuple[float, float]]:
        """(bin center, mean density) pairs on a logarithmic k grid."""
        positive = self.ks[(self.ks > 0) & (self.pmf > 0)]
        if positive.size == 0:
            return []
        k_hi = positive.max()
        edges = [1.0]
        ratio = 10.0 ** (1.0 / bins_per_decade)
        while edges[-1] <= k_hi:
            edges.append(edges[-1] * ratio)
        out = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            sel = (self.ks >= lo) & (self.ks < hi)
            width = max(1.0, np.floor(hi) - np.ceil(lo) + 1)
            mass = self.pmf[sel].sum()
            if mass > 0:
                out.append((math.sqrt(lo * hi), float(mass / width)))
        return out


def degree_histogram(g: Graph) -> DegreeHistogram:
    """Normalized degree pmf and CCDF of a non-empty graph."""
    if g.node_count == 0:
        raise AnalysisError("degree histogram of an empty graph")
    d = g.degrees()
    counts = np.bincount(d)
    pmf = counts / g.node_count
    ccdf = np.cumsum(pmf[::-1])[::-1]
    return DegreeHistogram(
        ks=np.arange(counts.size, dtype=np.int64), pmf=pmf, ccdf=ccdf
    )


@dataclass(frozen=True)
class TheoreticalModel:
    """Mean-field degree-distribution model for the evolved topology.

    ``e_min == e_max`` is the degenerate constant-energy case (the energy
    density becomes a point mass and the curve a pure power law).
    """

    m: int
    e_min: float
    e_max: float

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError(f"m must be >= 1, got {self.m}")
        if not (0 < self.e_min <= self.e_max):
            raise ConfigError(
                f"need 0 < e_min <= e_max, got [{self.e_min}, {self.e_max}]"
            )

    @property
    def e_bar(self) -> float:
        return 0.5 * (self.e_min + self.e_max)

    @property
    def rho(self) -> float:
        """Uniform energy density; undefined (inf) when e_min == e_max."""
        if self.e_max == self.e_min:
            return math.inf
        return 1.0 / (self.e_max - self.e_min)

    def beta(self, energy: float) -> float:
        return energy / (2.0 * self.e_bar)


def theoretical_pk(model: TheoreticalModel, k: float, epsrel: float = 1e-8) -> float:
    """Continuum degree density P(k) for k >= m.

    Integrates the per-energy density against the uniform energy weight by
    adaptive quadrature (relative tolerance ``epsrel``); constant energy
    short-circuits to the closed form with exponent 1 + 1/beta = 3.
    """
    if k < model.m:
        raise AnalysisError(f"theoretical density defined for k >= m={model.m}")
    if model.e_min == model.e_max:
        inv_beta = 1.0 / model.beta(model.e_min)
        return inv_beta * model.m ** inv_beta * float(k) ** -(1.0 + inv_beta)

    def integrand(energy: float) -> float:
        inv_beta = 1.0 / model.beta(energy)
        return (
            model.rho * inv_beta * model.m ** inv_beta * float(k) ** -(1.0 + inv_beta)
        )

    value, _ = integrate.quad(
        integrand, model.e_min, model.e_max, epsabs=0.0, epsrel=epsrel, limit=200
    )
    return float(value)


def theoretical_bin_pmf(
    model: TheoreticalModel, ks: np.ndarray, epsrel: float = 1e-8
) -> np.ndarray:
    """Unit-bin masses of the continuum density: integral over [k, k+1).

    Summed over all k >= m these masses telescope to 1 exactly, which makes
    them the right discretization to hold against an empirical pmf.
    """
    ks = np.asarray(ks)
    if ks.size and ks.min() < model.m:
        raise AnalysisError(f"bin masses defined for k >= m={model.m}")

    def mass(k: float) -> float:
        if model.e_min == model.e_max:
            inv_beta = 1.0 / model.beta(model.e_min)
            return model.m ** inv_beta * (
                float(k) ** -inv_beta - float(k + 1) ** -inv_beta
            )

        def integrand(energy: float) -> float:
            inv_beta = 1.0 / model.beta(energy)
            return (
                model.rho
                * model.m ** inv_beta
                * (float(k) ** -inv_beta - float(k + 1) ** -inv_beta)
            )

        value, _ = integrate.quad(
            integrand, model.e_min, model.e_max, epsabs=0.0, epsrel=epsrel, limit=200
        )
        return float(value)

    return np.array([mass(int(k)) for k in ks], dtype=np.float64)


def ks_distance_to_theory(degrees, model: TheoreticalModel) -> float:
    """Kolmogorov-Smirnov gap between empirical degrees (k >= m) and theory.

    The empirical side is the degree pmf conditioned on k >= m; the
    theoretical side keeps its intrinsic normalization (the unit-bin masses
    already sum to 1 over m..infinity), so theory mass beyond the observed
    maximum shows up as an end gap rather than being folded back in.
    """
    d = np.asarray(degrees, dtype=np.int64)
    sel = d[d >= model.m]
    if sel.size == 0:
        raise AnalysisError(f"no degrees at k >= m={model.m}")
    k_hi = int(sel.max())
    ks = np.arange(model.m, k_hi + 1)
    emp = np.bincount(sel, minlength=k_hi + 1)[model.m :] / sel.size
    theo = theoretical_bin_pmf(model, ks)
    return float(np.abs(np.cumsum(emp) - np.cumsum(theo)).max())


def _hurwitz(s: float, a: float) -> float:
    return float(zeta(s, a))


def fit_power_law_exponent(
    degrees, k_min: int, min_samples: int = 2
) -> tuple[float, float]:
    """Discrete maximum-likelihood exponent of P(k) ~ k^-gamma for k >= k_min.

    Returns (gamma, asymptotic standard error).  Raises :class:`FitError`
    when the tail sample is too small or concentrated on a single k.
    """
    d = np.asarray(list(degrees), dtype=np.int64)
    tail = d[d >= k_min]
    n = int(tail.size)
    if n < min_samples or np.unique(tail).size < 2:
        raise FitError(
            f"{n} tail samples at k >= {k_min}, need >= {min_samples} over >= 2 "
            "distinct degrees",
            sample_count=n,
        )
    mean_log = float(np.mean(np.log(tail)))

    h = 1e-5

    def log_zeta(s: float) -> float:
        return math.log(_hurwitz(s, k_min))

    def objective(s: float) -> float:
        # d/ds log zeta(s, k_min) equals -E[ln k]; the MLE matches that
        # expectation to the sample mean of ln k
        return (log_zeta(s + h) - log_zeta(s - h)) / (2 * h) + mean_log

    lo, hi = 1.0 + 2 * h, 60.0  # zeta(s, a) diverges at s = 1
    if objective(lo) * objective(hi) > 0:
        raise FitError("no exponent in (1, 60] matches the sample", sample_count=n)
    gamma = float(optimize.bisect(objective, lo, hi, xtol=1e-8))

    z = _hurwitz(gamma, k_min)
    zp = (_hurwitz(gamma + h, k_min) - _hurwitz(gamma - h, k_min)) / (2 * h)
    zpp = (
        _hurwitz(gamma + h, k_min) - 2 * z + _hurwitz(gamma - h, k_min)
    ) / (h * h)
    info = zpp / z - (zp / z) ** 2
    stderr = 1.0 / math.sqrt(n * info) if info > 0 else math.inf
    return gamma, stderr


def fit_power_law_tail(
    degrees, k_lo: int, k_hi: int = 40, min_tail: int = 100
) -> tuple[float, float, int]:
    """Tail exponent with the cutoff chosen by KS minimization.

    Families like preferential-attachment graphs are power laws only
    asymptotically; fitting from the first support point drags the estimate
    below the true tail exponent.  This scans the cutoff k_min over
    [k_lo, k_hi], fits at each, and keeps the fit whose KS distance to its
    own model is smallest.  Returns (gamma, stderr, chosen k_min).
    """
    d = np.asarray(list(degrees), dtype=np.int64)
    best: tuple[float, float, float, int] | None = None
    for k_min in range(k_lo, k_hi + 1):
        tail = d[d >= k_min]
        if tail.size < min_tail or np.unique(tail).size < 2:
            break
        gamma, err = fit_power_law_exponent(tail, k_min)
        k_sup = int(tail.max())
        ks_range = np.arange(k_min, k_sup + 1)
        emp = np.bincount(tail, minlength=k_sup + 1)[k_min:] / tail.size
        theo = ks_range.astype(float) ** -gamma / _hurwitz(gamma, k_min)
        ksd = float(np.abs(np.cumsum(emp) - np.cumsum(theo)).max())
        if best is None or ksd < best[0]:
            best = (ksd, gamma, err, k_min)
    if best is None:
        raise FitError(f"no cutoff in [{k_lo}, {k_hi}] leaves a fittable tail",
                       sample_count=int(d.size))
    return best[1], best[2], best[3]


def _csr_adjacency(g: Graph) -> csr_matrix:
    und = g.undirected()
    rows, cols = [], []
    for u in range(und.node_count):
        for v in und.adjacency[u]:
            rows.append(u)
            cols.append(v)
    data = np.ones(len(rows), dtype=np.int8)
    return csr_matrix(
        (data, (rows, cols)), shape=(und.node_count, und.node_count)
    )


def giant_components(g: Graph, sink: int | None) -> tuple[int, int]:
    """(largest component size, sink's component size) on the undirected view.

    ``sink=None`` models a removed sink and yields a sink size of 0.
    """
    if g.node_count == 0:
        return 0, 0
    if sink is not None and not (0 <= sink < g.node_count):
        raise AnalysisError(f"sink {sink} outside 0..{g.node_count - 1}")
    adj = _csr_adjacency(g)
    _, labels = connected_components(adj, directed=False)
    sizes = np.bincount(labels)
    gc = int(sizes.max())
    sink_size = int(sizes[labels[sink]]) if sink is not None else 0
    return gc, sink_size


@dataclass(frozen=True)
class RobustnessCurve:
    """Giant-component fractions vs. removal fraction, over repeated trials.

    Means and stds (sample std, ddof=1 for trials > 1) are accumulated with
    ``math.fsum`` so the aggregate is independent of trial ordering.
    """

    removal_fractions: tuple[float, ...]
    gc_fraction_mean: tuple[float, ...]
    gc_fraction_std: tuple[float, ...]
    sink_gc_fraction_mean: tuple[float, ...]
    sink_gc_fraction_std: tuple[float, ...]
    trials: int
    seed: int


def _fsum_mean_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def random_failure_sweep(
    g: Graph, sink: int, fractions, trials: int, seed: int
) -> RobustnessCurve:
    """Remove random non-sink nodes and track both giant-component metrics.

    For each fraction p and trial, ``floor(p * (n - 1))`` distinct non-sink
    nodes vanish with their edges; component sizes are reported relative to
    the original node count.  Trial (fraction_index, trial_index) draws its
    own stream from the base seed, so trials are order-independent and
    parallelizable.
    """
    fractions = tuple(float(p) for p in fractions)
    if any(not (0 <= p < 1) for p in fractions):
        raise ConfigError("removal fractions must lie in [0, 1)")
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    n = g.node_count
    adj = _csr_adjacency(g)
    non_sink = np.array([v for v in range(n) if v != sink], dtype=np.int64)

    gc_means, gc_stds, sink_means, sink_stds = [], [], [], []
    for fi, p in enumerate(fractions):
        count = int(p * (n - 1))
        gc_vals, sink_vals = [], []
        for ti in range(trials):
            gen = substream(seed, "sweep", fi, ti)
            removed = non_sink[sample_indices(gen, non_sink.size, count)]
            keep = np.ones(n, dtype=bool)
            keep[removed] = False
            keep_ids = np.flatnonzero(keep)
            sub = adj[keep_ids][:, keep_ids]
            _, labels = connected_components(sub, directed=False)
            sizes = np.bincount(labels)
            sink_idx = int(np.searchsorted(keep_ids, sink))
            gc_vals.append(float(sizes.max()) / n)
            sink_vals.append(float(sizes[labels[sink_idx]]) / n)
        m, s = _fsum_mean_std(gc_vals)
        gc_means.append(m)
        gc_stds.append(s)
        m, s = _fsum_mean_std(sink_vals)
        sink_means.append(m)
        sink_stds.append(s)

    return RobustnessCurve(
        removal_fractions=fractions,
        gc_fraction_mean=tuple(gc_means),
        gc_fraction_std=tuple(gc_stds),
        sink_gc_fraction_mean=tuple(sink_means),
        sink_gc_fraction_std=tuple(sink_stds),
        trials=trials,
        seed=seed,
    )
