"""Dataset fusion and the two-stage fine-tuning regime."""

from collections import Counter

import numpy as np
import pytest

from docqa.corpus import (
    Corpus,
    Dataset,
    Document,
    MetadataSchema,
    PreprocessConfig,
    QAPair,
    analyze,
    english_stopwords,
)
from docqa.errors import DatasetError, ModelError
from docqa.reader import (
    LogRegConfig,
    NeuralConfig,
    fine_tune_logreg,
    fine_tune_neural,
    train_logreg,
    train_neural,
)
from docqa.transfer import (
    DEFAULT_RATIO,
    FineTuneSchedule,
    default_schedule,
    fuse_and_oversample,
    init_and_fine_tune,
    train_fused,
)

CFG = PreprocessConfig(stopword_list=english_stopwords())


def make_doc(doc_id, text):
    tokens, ir_tokens = analyze(text, CFG)
    return Document(id=doc_id, title=doc_id, text=text, tokens=tokens, ir_tokens=ir_tokens, metadata={})


def make_pair(i, origin, doc_id="d0"):
    return QAPair(
        question=f"question {i}",
        gold_answers=["alpha"],
        doc_id=doc_id,
        gold_span=(0, 0),
        origin=origin,
        id=f"{origin}-{i}",
    )


def source_target(n_source=10, n_target=2):
    source = Dataset(pairs=[make_pair(i, "source") for i in range(n_source)], name="src")
    target = Dataset(pairs=[make_pair(i, "target") for i in range(n_target)], name="tgt")
    return source, target


def small_corpus():
    docs = [
        make_doc("d0", "alpha beta gamma delta"),
        make_doc("d1", "epsilon zeta eta theta"),
    ]
    return Corpus(documents=docs, schema=MetadataSchema(fields={}), config=CFG)


# -------------------------------------------------------------------- fusion


def test_fusion_counts_are_exact():
    source, target = source_target(10, 2)
    fused = fuse_and_oversample(source, target, ratio=3, seed=0)
    assert len(fused) == 16
    counts = Counter(p.id for p in fused)
    for pair in source.pairs:
        assert counts[pair.id] == 1
    for pair in target.pairs:
        assert counts[pair.id] == 3
    assert fused.ratio == 3
    assert fused.shuffle_seed == 0


def test_fusion_ratio_one_is_concatenation():
    source, target = source_target(10, 2)
    fused = fuse_and_oversample(source, target, ratio=1, seed=4)
    assert len(fused) == 12
    assert Counter(p.id for p in fused) == Counter(p.id for p in source.pairs + target.pairs)


def test_fusion_default_ratio_is_three():
    source, target = source_target(4, 1)
    assert DEFAULT_RATIO == 3
    assert len(fuse_and_oversample(source, target)) == 4 + 3


def test_fusion_at_reference_scale():
    # 107,785 source + 3 x 393 target pairs; target share just over 1%
    source, target = source_target(107_785, 393)
    fused = fuse_and_oversample(source, target, ratio=3, seed=1)
    assert len(fused) == 108_964
    n_target = sum(1 for p in fused if p.origin == "target")
    assert n_target == 3 * 393
    assert round(n_target / len(fused), 4) == 0.0108


def test_fusion_is_deterministic_per_seed():
    source, target = source_target(8, 3)
    a = fuse_and_oversample(source, target, ratio=2, seed=9)
    b = fuse_and_oversample(source, target, ratio=2, seed=9)
    c = fuse_and_oversample(source, target, ratio=2, seed=10)
    assert [p.id for p in a] == [p.id for p in b]
    assert [p.id for p in a] != [p.id for p in c]


def test_fusion_rejects_bad_ratio():
    source, target = source_target()
    with pytest.raises(ValueError):
        fuse_and_oversample(source, target, ratio=0)


def test_fusion_rejects_empty_datasets():
    source, target = source_target()
    with pytest.raises(DatasetError):
        fuse_and_oversample(Dataset(pairs=[], name="s"), target)
    with pytest.raises(DatasetError):
        fuse_and_oversample(source, Dataset(pairs=[], name="t"))


def test_fusion_rejects_mistagged_origins():
    source, target = source_target()
    with pytest.raises(DatasetError):
        fuse_and_oversample(target, target)
    with pytest.raises(DatasetError):
        fuse_and_oversample(source, source)


# ------------------------------------------------------------- fused training


def test_train_fused_rejects_untrainable_kind():
    source, target = source_target(2, 1)
    fused = fuse_and_oversample(source, target)
    with pytest.raises(ValueError, match="trainable"):
        train_fused("sliding", fused, small_corpus(), None)
    with pytest.raises(ValueError):
        train_fused("quantum", fused, small_corpus(), None)


def test_train_fused_ratio_one_equals_plain_training():
    corpus = small_corpus()
    source = Dataset(
        pairs=[
            QAPair(question="find alpha", gold_answers=["alpha"], doc_id="d0", gold_span=(0, 0), origin="source", id="s0"),
            QAPair(question="find gamma", gold_answers=["gamma"], doc_id="d0", gold_span=(2, 2), origin="source", id="s1"),
        ],
        name="src",
    )
    target = Dataset(
        pairs=[QAPair(question="find zeta", gold_answers=["zeta"], doc_id="d1", gold_span=(1, 1), origin="target", id="t0")],
        name="tgt",
    )
    fused = fuse_and_oversample(source, target, ratio=1, seed=3)
    config = NeuralConfig(d_emb=4, d_h=3, lr=5e-3, epochs=3, batch=2, seed=1, max_context_len=20)
    via_fused = train_fused("neural", fused, corpus, config)
    via_plain = train_neural(Dataset(pairs=list(fused.pairs), name="manual"), corpus, config)
    assert via_fused.train_losses == via_plain.train_losses


# ----------------------------------------------------------------- fine-tune


def neural_stage_data():
    corpus = small_corpus()
    source = Dataset(
        pairs=[
            QAPair(question="find alpha", gold_answers=["alpha"], doc_id="d0", gold_span=(0, 0), origin="source", id="s0"),
            QAPair(question="find delta", gold_answers=["delta"], doc_id="d0", gold_span=(3, 3), origin="source", id="s1"),
        ],
        name="src",
    )
    target = Dataset(
        pairs=[QAPair(question="find eta", gold_answers=["eta"], doc_id="d1", gold_span=(2, 2), origin="target", id="t0")],
        name="tgt",
    )
    return corpus, source, target


def test_default_schedule_scales_lr_down():
    stage1 = NeuralConfig(lr=2e-3, epochs=5)
    schedule = default_schedule(stage1)
    assert schedule.stage1 == stage1
    assert schedule.stage2.lr == pytest.approx(2e-4)
    assert schedule.stage2.epochs == 20
    assert schedule.stage2.d_emb == stage1.d_emb


def test_fine_tune_stage2_no_epochs_is_stage1():
    corpus, source, target = neural_stage_data()
    stage1_cfg = NeuralConfig(d_emb=4, d_h=3, lr=5e-3, epochs=2, batch=2, seed=0, max_context_len=20)
    schedule = FineTuneSchedule(stage1=stage1_cfg, stage2=NeuralConfig(d_emb=4, d_h=3, lr=1e-3, epochs=0, max_context_len=20))
    tuned = init_and_fine_tune("neural", source, target, corpus, schedule)
    stage1_only = train_neural(source, corpus, stage1_cfg)
    for key, value in stage1_only.net.state_dict().items():
        assert (tuned.net.state_dict()[key] == value).all()


def test_fine_tune_stage2_zero_lr_changes_nothing():
    corpus, source, target = neural_stage_data()
    stage1_cfg = NeuralConfig(d_emb=4, d_h=3, lr=5e-3, epochs=2, batch=2, seed=0, max_context_len=20)
    schedule = FineTuneSchedule(stage1=stage1_cfg, stage2=NeuralConfig(d_emb=4, d_h=3, lr=0.0, epochs=3, max_context_len=20))
    tuned = init_and_fine_tune("neural", source, target, corpus, schedule)
    stage1_only = train_neural(source, corpus, stage1_cfg)
    for key, value in stage1_only.net.state_dict().items():
        assert (tuned.net.state_dict()[key] == value).all()
    assert len(tuned.train_losses) == 2 + 3


def test_fine_tune_does_not_mutate_stage1_model():
    corpus, source, target = neural_stage_data()
    stage1 = train_neural(source, corpus, NeuralConfig(d_emb=4, d_h=3, lr=5e-3, epochs=2, batch=2, seed=0, max_context_len=20))
    before = {k: v.clone() for k, v in stage1.net.state_dict().items()}
    fine_tune_neural(stage1, target, corpus, NeuralConfig(d_emb=4, d_h=3, lr=1e-2, epochs=3, max_context_len=20))
    for key, value in before.items():
        assert (stage1.net.state_dict()[key] == value).all()


def test_fine_tune_neural_rejects_dim_mismatch():
    corpus, source, target = neural_stage_data()
    stage1 = train_neural(source, corpus, NeuralConfig(d_emb=4, d_h=3, epochs=0, max_context_len=20))
    with pytest.raises(ModelError):
        fine_tune_neural(stage1, target, corpus, NeuralConfig(d_emb=8, d_h=3, epochs=1, max_context_len=20))


def test_fine_tune_logreg_continues_from_weights():
    corpus, source, target = neural_stage_data()
    stage1 = train_logreg(source, corpus, LogRegConfig(epochs=30, max_span_len=4))
    tuned = fine_tune_logreg(stage1, target, corpus, LogRegConfig(lr=0.0, epochs=10, max_span_len=4))
    assert np.array_equal(tuned.weights, stage1.weights)
    moved = fine_tune_logreg(stage1, target, corpus, LogRegConfig(lr=0.5, epochs=10, max_span_len=4))
    assert not np.array_equal(moved.weights, stage1.weights)
    assert moved.idf == stage1.idf


def test_fine_tune_logreg_rejects_span_cap_mismatch():
    corpus, source, target = neural_stage_data()
    stage1 = train_logreg(source, corpus, LogRegConfig(epochs=5, max_span_len=4))
    with pytest.raises(ModelError):
        fine_tune_logreg(stage1, target, corpus, LogRegConfig(epochs=5, max_span_len=7))


def test_init_and_fine_tune_logreg_end_to_end():
    corpus, source, target = neural_stage_data()
    schedule = default_schedule(LogRegConfig(epochs=40, max_span_len=4))
    model = init_and_fine_tune("logreg", source, target, corpus, schedule)
    assert model.weights.shape == (11,)
    assert model.max_span_len == 4
