"""Bin schedulers: history-aware greedy weights plus baseline samplers.

The history-aware scheduler keeps one weight per bin in [0, 1], nudged by
kappa times the predicted scalar utility of the visited bin and clipped back
into [0, 1]. Sampling normalizes (weight + epsilon) over the active bin set,
so every active bin keeps positive probability. Baselines implement the same
select/observe interface: UCB and Thompson sampling bandits (argmax over
per-bin weights), a uniform sampler, and a deterministic round-robin sweep.

All schedulers are deterministic functions of (state, rng stream). Ties in
argmax selections break toward the lowest bin id for reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class UtilityParams:
    """Scalarization and update constants for the history-aware scheduler."""

    alpha: float = 0.5
    kappa: float = 0.2
    epsilon: float = 1e-3

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


def utility(prediction, alpha: float) -> float:
    """Scalar utility: alpha * predicted linear reward + (1 - alpha) * angular."""
    r_lin, r_ang = float(prediction[0]), float(prediction[1])
    return alpha * r_lin + (1.0 - alpha) * r_ang


def ha_greedy_update(w: np.ndarray, bin_id: int, u: float, kappa: float) -> np.ndarray:
    """Clipped greedy weight update on the visited bin; other entries untouched."""
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    out = w.copy()
    out[bin_id] = min(1.0, max(0.0, out[bin_id] + kappa * u))
    return out


def normalize(w: np.ndarray, active: np.ndarray, epsilon: float) -> np.ndarray:
    """Meta-policy over bins: (w + eps) normalized on the active set, 0 elsewhere."""
    active = np.asarray(active, dtype=int)
    if active.size == 0:
        raise ValueError("active bin set must be non-empty")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    p = np.zeros_like(w, dtype=float)
    shifted = w[active] + epsilon
    p[active] = shifted / shifted.sum()
    return p


def sample_bin(p: np.ndarray, rng: np.random.Generator) -> int:
    """Categorical draw by inverse CDF; deterministic given the rng state."""
    cdf = np.cumsum(p)
    u = rng.random() * cdf[-1]
    return int(min(np.searchsorted(cdf, u, side="right"), len(p) - 1))


@dataclass
class BanditState:
    """Per-bin pull counts, running means, and Beta posteriors."""

    counts: np.ndarray
    means: np.ndarray
    beta_a: np.ndarray
    beta_b: np.ndarray
    t: int = 0

    @classmethod
    def fresh(cls, n_bins: int) -> "BanditState":
        return cls(
            counts=np.zeros(n_bins, dtype=int),
            means=np.zeros(n_bins, dtype=float),
            beta_a=np.ones(n_bins, dtype=float),
            beta_b=np.ones(n_bins, dtype=float),
        )


def ucb_weight(state: BanditState, bin_id: int) -> float:
    """Mean plus confidence bonus; unvisited bins get +inf so they go first."""
    n = state.counts[bin_id]
    if n == 0:
        return float("inf")
    return float(state.means[bin_id] + np.sqrt(2.0 * np.log(state.t) / n))


def thompson_weight(state: BanditState, bin_id: int, rng: np.random.Generator) -> float:
    """One Beta posterior draw for the bin."""
    return float(rng.beta(state.beta_a[bin_id], state.beta_b[bin_id]))


def update_bandit(state: BanditState, bin_id: int, reward: float) -> BanditState:
    """Record one pull with a normalized reward in [0, 1]; mutates state."""
    if not (0.0 <= reward <= 1.0):
        raise ValueError(f"bandit reward must be in [0, 1], got {reward}")
    state.counts[bin_id] += 1
    n = state.counts[bin_id]
    state.means[bin_id] += (reward - state.means[bin_id]) / n
    # Bernoulli conversion for the Beta posterior: success iff reward >= 0.5.
    if reward >= 0.5:
        state.beta_a[bin_id] += 1.0
    else:
        state.beta_b[bin_id] += 1.0
    state.t += 1
    return state


class Scheduler:
    """Common front for all scheduler kinds.

    select() picks a bin from the active set; observe() feeds back the
    episode outcome. predicted_utility is the scalarized fresh prediction
    (None when the run has no predictor); observed_utility is the
    scalarized normalized reward actually received.
    """

    kind: str = ""

    def select(self, active: np.ndarray, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def observe(self, bin_id: int, predicted_utility, observed_utility: float) -> None:
        pass

    def state_dict(self) -> dict:
        return {}

    def load_state_dict(self, state: dict) -> None:
        pass


class HaGreedyScheduler(Scheduler):
    """Clipped greedy weights over bins, sampled through the meta-policy."""

    kind = "ha_greedy"

    def __init__(self, n_bins: int, params: UtilityParams = UtilityParams(), initial_weight: float = 0.5):
        if not (0.0 <= initial_weight <= 1.0):
            raise ValueError(f"initial_weight must be in [0, 1], got {initial_weight}")
        self.params = params
        self.weights = np.full(n_bins, float(initial_weight))

    def policy(self, active: np.ndarray) -> np.ndarray:
        return normalize(self.weights, active, self.params.epsilon)

    def select(self, active: np.ndarray, rng: np.random.Generator) -> int:
        return sample_bin(self.policy(active), rng)

    def observe(self, bin_id, predicted_utility, observed_utility):
        # Weights move on the predicted utility; falls back to the observed
        # one when the run has no predictor attached.
        u = observed_utility if predicted_utility is None else predicted_utility
        self.weights = ha_greedy_update(self.weights, bin_id, u, self.params.kappa)

    def state_dict(self):
        return {"weights": self.weights.copy()}

    def load_state_dict(self, state):
        self.weights = np.asarray(state["weights"], dtype=float).copy()


class _BanditScheduler(Scheduler):
    def __init__(self, n_bins: int):
        self.state = BanditState.fresh(n_bins)

    def observe(self, bin_id, predicted_utility, observed_utility):
        update_bandit(self.state, bin_id, observed_utility)

    def state_dict(self):
        return {
            "counts": self.state.counts.copy(),
            "means": self.state.means.copy(),
            "beta_a": self.state.beta_a.copy(),
            "beta_b": self.state.beta_b.copy(),
            "t": self.state.t,
        }

    def load_state_dict(self, state):
        self.state.counts = np.asarray(state["counts"], dtype=int).copy()
        self.state.means = np.asarray(state["means"], dtype=float).copy()
        self.state.beta_a = np.asarray(state["beta_a"], dtype=float).copy()
        self.state.beta_b = np.asarray(state["beta_b"], dtype=float).copy()
        self.state.t = int(state["t"])


class UcbScheduler(_BanditScheduler):
    kind = "ucb"

    def select(self, active, rng):
        counts = self.state.counts[active]
        unvisited = np.flatnonzero(counts == 0)
        if unvisited.size > 0:
            return int(active[unvisited[0]])
        bonus = np.sqrt(2.0 * np.log(self.state.t) / counts)
        scores = self.state.means[active] + bonus
        return int(active[int(np.argmax(scores))])


class ThompsonScheduler(_BanditScheduler):
    kind = "thompson"

    def select(self, active, rng):
        # One Beta draw per active bin, in ascending id order.
        draws = rng.beta(self.state.beta_a[active], self.state.beta_b[active])
        return int(active[int(np.argmax(draws))])


class UniformScheduler(Scheduler):
    kind = "uniform"

    def __init__(self, n_bins: int):
        self.n_bins = n_bins

    def select(self, active, rng):
        return int(active[rng.integers(len(active))])


class FixedGridScheduler(Scheduler):
    """Deterministic round-robin sweep of the active set in ascending id order."""

    kind = "fixed_grid"

    def __init__(self, n_bins: int):
        self.cursor = 0

    def select(self, active, rng):
        chosen = int(active[self.cursor % len(active)])
        self.cursor += 1
        return chosen

    def state_dict(self):
        return {"cursor": self.cursor}

    def load_state_dict(self, state):
        self.cursor = int(state["cursor"])


SCHEDULER_KINDS = ("ha_greedy", "ucb", "thompson", "uniform", "fixed_grid")


def make_scheduler(
    kind: str,
    n_bins: int,
    params: UtilityParams = UtilityParams(),
    initial_weight: float = 0.5,
) -> Scheduler:
    if kind == "ha_greedy":
        return HaGreedyScheduler(n_bins, params, initial_weight)
    if kind == "ucb":
        return UcbScheduler(n_bins)
    if kind == "thompson":
        return ThompsonScheduler(n_bins)
    if kind == "uniform":
        return UniformScheduler(n_bins)
    if kind == "fixed_grid":
        return FixedGridScheduler(n_bins)
    raise ValueError(f"unknown scheduler kind {kind!r}; expected one of {SCHEDULER_KINDS}")
