"""Training regimes for domain transfer.

Two ways to adapt a reader to a small in-domain dataset: retrain from
scratch on the source data fused with oversampled target data, or train on
the source first and fine-tune on the target from those parameters.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .corpus.types import Corpus, Dataset, QAPair
from .errors import DatasetError
from .reader.logreg import LogRegConfig, fine_tune_logreg, train_logreg
from .reader.neural import NeuralConfig, fine_tune_neural, train_neural

DEFAULT_RATIO = 3
TRAINABLE_KINDS = ("logreg", "neural")


@dataclass
class FusedDataset:
    """Source pairs once plus each target pair `ratio` times, in a seeded
    shuffle of that multiset."""

    pairs: list[QAPair]
    ratio: int
    shuffle_seed: int
    name: str = "fused"

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


@dataclass(frozen=True)
class FineTuneSchedule:
    """Stage-one config trains on the source; stage two continues on the
    target from the stage-one parameters."""

    stage1: LogRegConfig | NeuralConfig
    stage2: LogRegConfig | NeuralConfig


def default_schedule(stage1: LogRegConfig | NeuralConfig) -> FineTuneSchedule:
    """Untuned reference schedule: stage-two runs at a tenth of the
    stage-one learning rate for 20 epochs."""
    return FineTuneSchedule(stage1=stage1, stage2=replace(stage1, lr=stage1.lr * 0.1, epochs=20))


def _check_origins(dataset: Dataset, expected: str, role: str) -> None:
    bad = [p.id for p in dataset.pairs if p.origin != expected]
    if bad:
        raise DatasetError(f"{role} dataset has pairs not tagged origin={expected!r}: {bad[:5]}")


def fuse_and_oversample(
    source: Dataset, target: Dataset, ratio: int = DEFAULT_RATIO, seed: int = 0
) -> FusedDataset:
    """Merge the datasets with the target replicated `ratio` times, then
    shuffle once with the given seed."""
    if ratio < 1:
        raise ValueError(f"ratio must be a positive integer, got {ratio}")
    if not source.pairs:
        raise DatasetError("source dataset is empty; nothing to fuse")
    if not target.pairs:
        raise DatasetError("target dataset is empty; fusion is meaningless")
    _check_origins(source, "source", "source")
    _check_origins(target, "target", "target")
    multiset = list(source.pairs)
    for pair in target.pairs:
        multiset.extend([pair] * ratio)
    random.Random(seed).shuffle(multiset)
    return FusedDataset(
        pairs=multiset,
        ratio=ratio,
        shuffle_seed=seed,
        name=f"{source.name}+{target.name}x{ratio}",
    )


def _check_trainable(reader_kind: str) -> None:
    if reader_kind == "sliding":
        raise ValueError("the sliding-window reader has no trainable parameters")
    if reader_kind not in TRAINABLE_KINDS:
        raise ValueError(f"unknown reader kind {reader_kind!r}; expected one of {TRAINABLE_KINDS}")


def train_fused(reader_kind: str, fused: FusedDataset, corpus: Corpus, config):
    """One from-scratch training run over the fused pair sequence with a
    single hyperparameter set."""
    _check_trainable(reader_kind)
    if reader_kind == "logreg":
        return train_logreg(fused, corpus, config)
    return train_neural(fused, corpus, config)


def init_and_fine_tune(
    reader_kind: str, source: Dataset, target: Dataset, corpus: Corpus, schedule: FineTuneSchedule
):
    """Train on the source, then continue on the target from the stage-one
    parameters under the stage-two config."""
    _check_trainable(reader_kind)
    if reader_kind == "logreg":
        stage1 = train_logreg(source, corpus, schedule.stage1)
        return fine_tune_logreg(stage1, target, corpus, schedule.stage2)
    stage1 = train_neural(source, corpus, schedule.stage1)
    return fine_tune_neural(stage1, target, corpus, schedule.stage2)
