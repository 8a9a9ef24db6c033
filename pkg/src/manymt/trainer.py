"""Desk-scale multi-task trainer over shared-parameter least-squares tasks.

Each task i holds its own (A_i, y_i) with loss ||A_i theta - y_i||^2 / m_i on
the shared parameter vector, so ERM-with-temperature vs DRO weighting can be
compared with exact full-batch gradients and every directional claim is
decidable. Modes:

* erm_temperature: fixed weights from the temperature distribution over task
  sizes, plain gradient descent on the weighted objective.
* dro: per step, recompute task losses, solve the chi-square worst case over
  excess losses (loss - baseline), and step on the q-weighted gradient.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, NumericError
from .sampling import DROConfig, dro_worst_case, temperature_distribution

DIVERGENCE_LIMIT = 1e12
DEFAULT_TAU = 1.0 / 0.3  # matches the alpha=0.3 upsampling of the ERM reference

MODES = ("erm_temperature", "dro")
STAGES = ("pretrain_large", "finetune_clean", "finetune_eval")


@dataclass
class LeastSquaresTask:
    direction: str
    A: np.ndarray
    y: np.ndarray
    size: int

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.A.ndim != 2 or self.y.ndim != 1 or self.A.shape[0] != self.y.shape[0]:
            raise DataError(f"task {self.direction}: A and y shapes disagree")
        if self.size <= 0:
            raise DataError(f"task {self.direction}: size must be positive")

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def loss(self, theta: np.ndarray) -> float:
        r = self.A @ theta - self.y
        return float(r @ r) / self.A.shape[0]

    def grad(self, theta: np.ndarray) -> np.ndarray:
        r = self.A @ theta - self.y
        return (2.0 / self.A.shape[0]) * (self.A.T @ r)


@dataclass
class TaskSuite:
    tasks: list[LeastSquaresTask]
    shared_dim: int

    def __post_init__(self):
        if not self.tasks:
            raise DataError("task suite is empty")
        for t in self.tasks:
            if t.dim != self.shared_dim:
                raise DataError(f"task {t.direction} has dim {t.dim}, expected {self.shared_dim}")

    @property
    def sizes(self) -> list[int]:
        return [t.size for t in self.tasks]

    def losses(self, theta: np.ndarray) -> np.ndarray:
        return np.array([t.loss(theta) for t in self.tasks])

    def to_dict(self) -> dict:
        return {
            "shared_dim": self.shared_dim,
            "tasks": [
                {"direction": t.direction, "size": t.size, "A": t.A.tolist(), "y": t.y.tolist()}
                for t in self.tasks
            ],
        }

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f)
            f.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "TaskSuite":
        with open(path, "r", encoding="utf-8") as f:
            blob = json.load(f)
        try:
            tasks = [
                LeastSquaresTask(
                    direction=t["direction"], A=np.array(t["A"]), y=np.array(t["y"]),
                    size=t["size"],
                )
                for t in blob["tasks"]
            ]
            return cls(tasks=tasks, shared_dim=blob["shared_dim"])
        except KeyError as e:
            raise DataError(f"{path}: task suite missing field {e}") from e


@dataclass
class TrainConfig:
    mode: str = "erm_temperature"
    tau: float = DEFAULT_TAU
    rho: float = 0.1
    steps: int = 100
    lr: float = 0.05
    seed: int = 0
    stage: str = "pretrain_large"
    checkpoint_every: int = 10

    def __post_init__(self):
        if self.mode not in MODES:
            raise DataError(f"unknown training mode {self.mode!r}")
        if self.stage not in STAGES:
            raise DataError(f"unknown stage {self.stage!r}")
        if self.steps <= 0:
            raise DataError("steps must be positive")
        if self.lr <= 0:
            raise DataError("lr must be positive")
        if self.checkpoint_every <= 0:
            raise DataError("checkpoint_every must be positive")


@dataclass
class Checkpoint:
    params: np.ndarray
    step: int
    per_task_loss: np.ndarray

    def to_dict(self) -> dict:
        return {
            "params": np.asarray(self.params).tolist(),
            "step": self.step,
            "per_task_loss": np.asarray(self.per_task_loss).tolist(),
        }

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f)
            f.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "Checkpoint":
        with open(path, "r", encoding="utf-8") as f:
            blob = json.load(f)
        return cls(
            params=np.array(blob["params"]),
            step=blob["step"],
            per_task_loss=np.array(blob["per_task_loss"]),
        )


def init_params(dim: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).normal(0.0, 0.1, size=dim)


def train(
    suite: TaskSuite,
    config: TrainConfig,
    baselines: np.ndarray | None = None,
    init: np.ndarray | None = None,
    start_step: int = 0,
    checkpoints: list[Checkpoint] | None = None,
):
    """Run one training stage; returns (final Checkpoint, history rows).

    History rows carry the step, stage, per-task losses, the weights used for
    the gradient step, and (in dro mode) the achieved divergence. Snapshots
    land in ``checkpoints`` every checkpoint_every steps when a list is given.
    """
    theta = init_params(suite.shared_dim, config.seed) if init is None else np.array(init, dtype=float)
    if theta.shape != (suite.shared_dim,):
        raise DataError("init parameter vector has the wrong dimension")
    n = len(suite.tasks)
    if baselines is None:
        baselines = np.zeros(n)
    baselines = np.asarray(baselines, dtype=float)
    if baselines.shape != (n,):
        raise DataError("baseline vector length does not match the suite")

    p_train = temperature_distribution(suite.sizes, config.tau).probs
    history: list[dict] = []
    for local_step in range(config.steps):
        step = start_step + local_step + 1
        losses = suite.losses(theta)
        if not np.all(np.isfinite(losses)) or losses.max() > DIVERGENCE_LIMIT:
            raise NumericError(f"training diverged at step {step}")
        if config.mode == "erm_temperature":
            weights = p_train
            divergence = 0.0
        else:
            dro = dro_worst_case(losses - baselines, DROConfig(rho=config.rho, p_train=p_train))
            weights = dro.q
            divergence = dro.divergence
        grad = np.zeros(suite.shared_dim)
        for w, task in zip(weights, suite.tasks):
            if w != 0.0:
                grad += w * task.grad(theta)
        theta = theta - config.lr * grad
        history.append(
            {
                "step": step,
                "stage": config.stage,
                "objective": float(np.dot(weights, losses)),
                "losses": losses.tolist(),
                "weights": np.asarray(weights).tolist(),
                "divergence": divergence,
            }
        )
        if checkpoints is not None and step % config.checkpoint_every == 0:
            checkpoints.append(Checkpoint(params=theta.copy(), step=step,
                                          per_task_loss=suite.losses(theta)))

    final = Checkpoint(params=theta, step=start_step + config.steps,
                       per_task_loss=suite.losses(theta))
    return final, history


def compute_baselines(suite: TaskSuite, reference: Checkpoint) -> np.ndarray:
    """Per-task losses of a frozen reference model: b_i = L_i(theta_ref)."""
    return suite.losses(np.asarray(reference.params, dtype=float))


def average_checkpoints(checkpoints: list[Checkpoint], k: int) -> Checkpoint:
    """Arithmetic mean of the last k checkpoints' parameters."""
    if k <= 0:
        raise DataError("k must be positive")
    if len(checkpoints) < k:
        raise DataError(f"need at least {k} checkpoints, have {len(checkpoints)}")
    tail = checkpoints[-k:]
    dims = {np.asarray(c.params).shape for c in tail}
    if len(dims) != 1:
        raise DataError("checkpoint parameter dimensions differ")
    params = np.mean([np.asarray(c.params, dtype=float) for c in tail], axis=0)
    step = max(c.step for c in tail)
    losses = np.mean([np.asarray(c.per_task_loss, dtype=float) for c in tail], axis=0)
    return Checkpoint(params=params, step=step, per_task_loss=losses)


def staged_recipe(
    suite_large: TaskSuite,
    suite_clean: TaskSuite,
    suite_eval: TaskSuite,
    config: TrainConfig,
    stage_steps: tuple[int, int, int] | None = None,
    reference: Checkpoint | None = None,
):
    """Pretrain on the large suite, then finetune on clean and eval suites.

    stage_steps defaults to config.steps for each stage; a zero skips that
    stage. Baselines for DRO are recomputed per stage from the frozen
    reference checkpoint (zeros when none is given). Returns the final
    checkpoint and the concatenated history with stage labels.
    """
    suites = (suite_large, suite_clean, suite_eval)
    dims = {s.shared_dim for s in suites}
    if len(dims) != 1:
        raise DataError("staged suites must share the parameter dimension")
    if stage_steps is None:
        stage_steps = (config.steps, config.steps, config.steps)

    theta = init_params(suite_large.shared_dim, config.seed)
    step = 0
    history: list[dict] = []
    final = Checkpoint(params=theta, step=0, per_task_loss=suite_large.losses(theta))
    for stage, suite, steps in zip(STAGES, suites, stage_steps):
        if steps == 0:
            continue
        stage_config = TrainConfig(
            mode=config.mode, tau=config.tau, rho=config.rho, steps=steps,
            lr=config.lr, seed=config.seed, stage=stage,
            checkpoint_every=config.checkpoint_every,
        )
        baselines = compute_baselines(suite, reference) if reference is not None else None
        final, rows = train(suite, stage_config, baselines=baselines, init=theta,
                            start_step=step)
        theta = final.params
        step = final.step
        history.extend(rows)
    return final, history


def write_history_csv(path: str | Path, history: list[dict], directions: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["step", "stage", "objective", "divergence"]
            + [f"loss:{d}" for d in directions]
            + [f"weight:{d}" for d in directions]
        )
        for row in history:
            writer.writerow(
                [row["step"], row["stage"], f"{row['objective']:.12g}", f"{row['divergence']:.12g}"]
                + [f"{x:.12g}" for x in row["losses"]]
                + [f"{x:.12g}" for x in row["weights"]]
            )
