"""Group-relative policy optimization building blocks.

Advantages are group-standardized rewards A_i = (R_i - mu) / sigma with the
population standard deviation; near-zero-variance groups degrade to all-zero
advantages instead of dividing by ~0. The surrogate objective is the clipped
probability-ratio form

    (1/G) * sum_i min(rho_i * A_i, clip(rho_i, 1-eps, 1+eps) * A_i)

with rho_i = exp(new_logp_i - old_logp_i). No KL term.

The module also hosts an entropy-based group filter (keep prompts whose
rollout rewards are spread out, i.e. still informative) and a tabular toy
policy simulation that demonstrates the reward signal actually drives
improvement without any neural network in the loop.
"""

from __future__ import annotations

import csv
import json
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ContractError, DatasetError, ParseError, SchemaError
from .reward_text import text_edit_reward

DEFAULT_SIGMA_GUARD = 1e-8
DEFAULT_EPSILON = 0.2
DEFAULT_REWARD_BINS = 10
DEFAULT_ENTROPY_THRESHOLD = 0.3
DEFAULT_STEP_SIZE = 0.15
_TOY_ALPHABET_SIZE = 8


@dataclass(frozen=True)
class RolloutGroup:
    """G sampled responses for one input: rewards plus optional log-probs."""

    input_id: str
    rewards: tuple[float, ...]
    old_logp: tuple[float, ...] | None = None
    new_logp: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "rewards", tuple(float(r) for r in self.rewards))
        if not self.rewards:
            raise ContractError("rollout group must contain at least one reward")
        if not all(np.isfinite(self.rewards)):
            raise ContractError("rewards must be finite")
        for name in ("old_logp", "new_logp"):
            values = getattr(self, name)
            if values is None:
                continue
            values = tuple(float(v) for v in values)
            object.__setattr__(self, name, values)
            if len(values) != len(self.rewards):
                raise ContractError(f"{name} length must match rewards")

    @property
    def size(self) -> int:
        return len(self.rewards)


@dataclass(frozen=True)
class AdvantageSet:
    """Standardized advantages with the group stats they came from."""

    advantages: tuple[float, ...]
    mu: float
    sigma: float
    degenerate: bool


def group_advantages(
    rewards: Sequence[float], sigma_guard: float = DEFAULT_SIGMA_GUARD
) -> AdvantageSet:
    """Standardize rewards within their group (population sigma).

    Groups whose sigma falls below ``sigma_guard`` are degenerate: every
    advantage is exactly 0 so downstream updates become no-ops.
    """
    if len(rewards) < 2:
        raise ContractError("advantage computation needs at least 2 rewards")
    if sigma_guard <= 0:
        raise ContractError("sigma_guard must be positive")
    arr = np.asarray(rewards, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ContractError("rewards must be finite")
    mu = float(arr.mean())
    sigma = float(arr.std())
    if sigma < sigma_guard:
        return AdvantageSet((0.0,) * len(rewards), mu, sigma, degenerate=True)
    advantages = (arr - mu) / sigma
    return AdvantageSet(tuple(float(a) for a in advantages), mu, sigma, False)


def clipped_objective(
    group: RolloutGroup, advantages: AdvantageSet, epsilon: float = DEFAULT_EPSILON
) -> float:
    """Clipped surrogate: mean over min(rho*A, clip(rho, 1-eps, 1+eps)*A)."""
    if not 0.0 < epsilon < 1.0:
        raise ContractError("epsilon must lie in (0, 1)")
    if group.old_logp is None or group.new_logp is None:
        raise ContractError("clipped objective needs old_logp and new_logp")
    if len(advantages.advantages) != group.size:
        raise ContractError("advantages and group sizes differ")
    old = np.asarray(group.old_logp)
    new = np.asarray(group.new_logp)
    adv = np.asarray(advantages.advantages)
    rho = np.exp(new - old)
    clipped = np.clip(rho, 1.0 - epsilon, 1.0 + epsilon)
    return float(np.minimum(rho * adv, clipped * adv).mean())


def group_reward_entropy(rewards: Sequence[float], reward_bins: int) -> float:
    """Normalized Shannon entropy of the reward histogram on [0, 1].

    Rewards are clipped into [0, 1] and binned into ``reward_bins``
    equal-width bins; entropy is normalized by log(reward_bins) so the
    result lives in [0, 1]. A single bin carries no information: 0.0.
    """
    if reward_bins < 1:
        raise ContractError("reward_bins must be positive")
    if reward_bins == 1:
        return 0.0
    clipped = np.clip(np.asarray(rewards, dtype=np.float64), 0.0, 1.0)
    counts, _ = np.histogram(clipped, bins=reward_bins, range=(0.0, 1.0))
    probs = counts[counts > 0] / counts.sum()
    entropy = float(-(probs * np.log(probs)).sum())
    # + 0.0 turns the IEEE -0.0 of a single-bin histogram into plain 0.0
    return entropy / float(np.log(reward_bins)) + 0.0


def entropy_filter(
    groups: Sequence[RolloutGroup],
    reward_bins: int = DEFAULT_REWARD_BINS,
    threshold: float = DEFAULT_ENTROPY_THRESHOLD,
) -> list[str]:
    """Keep ids of groups whose reward spread is still informative.

    Groups with normalized reward entropy >= threshold survive; the result
    is sorted by entropy descending, ties broken by id ascending.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ContractError("threshold must lie in [0, 1]")
    scored = []
    for group in groups:
        if group.size < 2:
            raise ContractError(
                f"group {group.input_id!r} needs at least 2 rewards to filter"
            )
        scored.append((group_reward_entropy(group.rewards, reward_bins), group))
    kept = [(h, g) for h, g in scored if h >= threshold]
    kept.sort(key=lambda pair: (-pair[0], pair[1].input_id))
    return [g.input_id for _, g in kept]


def load_rollout_groups(path: str | Path) -> list[RolloutGroup]:
    """Read rollout groups from JSONL: {"input_id": str, "rewards": [reals]}.

    Groups with fewer than 2 rewards are rejected here, naming the group,
    so downstream math never sees them.
    """
    groups: list[RolloutGroup] = []
    seen: set[str] = set()
    try:
        with open(path, encoding="utf-8") as fh:
            for line_number, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(
                        f"malformed JSON on line {line_number}: {exc.msg}"
                    ) from exc
                if not isinstance(obj, dict):
                    raise ParseError(f"expected a JSON object on line {line_number}")
                input_id = obj.get("input_id")
                rewards = obj.get("rewards")
                if not isinstance(input_id, str) or not input_id:
                    raise SchemaError(
                        f"line {line_number}: 'input_id' must be a non-empty string"
                    )
                if not isinstance(rewards, list) or not all(
                    isinstance(r, (int, float)) and not isinstance(r, bool)
                    for r in rewards
                ):
                    raise SchemaError(
                        f"line {line_number}: 'rewards' must be a list of numbers"
                    )
                if len(rewards) < 2:
                    raise DatasetError(
                        f"group {input_id!r} (line {line_number}) has fewer "
                        "than 2 rewards"
                    )
                if input_id in seen:
                    raise DatasetError(
                        f"duplicate group id {input_id!r} on line {line_number}"
                    )
                seen.add(input_id)
                groups.append(RolloutGroup(input_id, tuple(rewards)))
    except OSError as exc:
        raise DatasetError(f"cannot read groups file {path!s}: {exc}") from exc
    return groups


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    mean_reward: float
    max_reward: float


def _toy_alphabet(target: str) -> str:
    """Distinct target characters plus filler letters, at least 8 symbols."""
    symbols = sorted(set(target))
    for ch in string.ascii_lowercase:
        if len(symbols) >= _TOY_ALPHABET_SIZE:
            break
        if ch not in symbols:
            symbols.append(ch)
    return "".join(symbols)


def simulate_toy_policy_stats(
    target: str,
    group_size: int,
    iterations: int,
    step_size: float = DEFAULT_STEP_SIZE,
    seed: int = 0,
) -> list[IterationStats]:
    """Run the toy GRPO loop and return per-iteration reward statistics.

    The policy is a table of logits, one categorical distribution per output
    position over a small character alphabet (the target's characters padded
    with filler letters). Each iteration samples ``group_size`` strings,
    scores them with the edit-distance reward against ``target``, standardizes
    rewards into advantages, and applies the exact policy-gradient step of the
    clipped objective at rho = 1:

        logits[pos] += step_size * (1/G) * sum_i A_i * (onehot_i - softmax)

    Degenerate groups (all rewards equal) change nothing. The run is fully
    determined by ``seed``.
    """
    if not target:
        raise ContractError("target must be non-empty")
    if group_size < 2:
        raise ContractError("group_size must be at least 2")
    if iterations < 1:
        raise ContractError("iterations must be positive")
    alphabet = _toy_alphabet(target)
    k = len(alphabet)
    length = len(target)
    rng = np.random.default_rng(seed)
    logits = np.zeros((length, k))
    stats: list[IterationStats] = []
    for it in range(iterations):
        exps = np.exp(logits - logits.max(axis=1, keepdims=True))
        probs = exps / exps.sum(axis=1, keepdims=True)
        choices = np.empty((group_size, length), dtype=np.int64)
        for pos in range(length):
            choices[:, pos] = rng.choice(k, size=group_size, p=probs[pos])
        rewards = []
        for i in range(group_size):
            sample = "".join(alphabet[j] for j in choices[i])
            rewards.append(text_edit_reward(sample, target))
        adv_set = group_advantages(rewards)
        stats.append(
            IterationStats(it, float(np.mean(rewards)), float(np.max(rewards)))
        )
        if adv_set.degenerate or step_size == 0.0:
            continue
        adv = np.asarray(adv_set.advantages)
        grad = np.zeros_like(logits)
        for i in range(group_size):
            onehot = np.zeros_like(logits)
            onehot[np.arange(length), choices[i]] = 1.0
            grad += adv[i] * (onehot - probs)
        logits += step_size * grad / group_size
    return stats


def simulate_toy_policy(
    target: str,
    group_size: int,
    iterations: int,
    step_size: float = DEFAULT_STEP_SIZE,
    seed: int = 0,
) -> list[float]:
    """Mean-reward trajectory of the toy simulation (see the stats variant)."""
    return [
        s.mean_reward
        for s in simulate_toy_policy_stats(
            target, group_size, iterations, step_size, seed
        )
    ]


def write_trajectory_csv(
    stats: Sequence[IterationStats], path: str | Path
) -> None:
    """Write (iteration, mean_reward, max_reward) rows for external plotting."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "mean_reward", "max_reward"])
        for row in stats:
            writer.writerow([row.iteration, repr(row.mean_reward), repr(row.max_reward)])
