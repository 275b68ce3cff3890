"""Neural span reader: word embeddings with aligned question attention,
bidirectional gated recurrent encoders, self-attended question pooling, and
bilinear start/end classifiers with constrained decoding.

Everything runs in float64 on the CPU; training and prediction are
deterministic for a fixed seed (parameters are initialized from an explicit
generator and batch order is reshuffled with a per-epoch seeded RNG).
"""

from __future__ import annotations

import copy
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..corpus.preprocess import analyze
from ..corpus.types import Corpus, Dataset, Document, Token
from ..errors import ModelError
from .spans import Candidate, make_span

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class NeuralConfig:
    d_emb: int = 64
    d_h: int = 64
    lr: float = 1e-3
    epochs: int = 10
    batch: int = 32
    seed: int = 0
    max_span_len: int = 15
    max_context_len: int = 400
    grad_clip: float = 5.0
    pretrained_path: str | None = None


class _ReaderNet(torch.nn.Module):
    def __init__(self, n_vocab: int, d_emb: int, d_h: int):
        super().__init__()
        self.embed = torch.nn.Embedding(n_vocab + 1, d_emb)  # last row is OOV
        self.align_proj = torch.nn.Linear(d_emb, d_emb)
        self.q_gru = torch.nn.GRU(d_emb, d_h, bidirectional=True)
        self.c_gru = torch.nn.GRU(2 * d_emb, d_h, bidirectional=True)
        self.q_attn = torch.nn.Linear(2 * d_h, 1, bias=False)
        self.w_start = torch.nn.Parameter(torch.empty(2 * d_h, 2 * d_h))
        self.w_end = torch.nn.Parameter(torch.empty(2 * d_h, 2 * d_h))
        self.double()

    def log_dists(self, q_ids: torch.Tensor, c_ids: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        eq = self.embed(q_ids)
        ec = self.embed(c_ids)
        pq = torch.relu(self.align_proj(eq))
        pc = torch.relu(self.align_proj(ec))
        attn = torch.softmax(pc @ pq.T, dim=1)
        aligned = attn @ eq
        c_in = torch.cat([ec, aligned], dim=1).unsqueeze(1)
        p, _ = self.c_gru(c_in)
        p = p.squeeze(1)
        hq, _ = self.q_gru(eq.unsqueeze(1))
        hq = hq.squeeze(1)
        pool = torch.softmax(self.q_attn(hq).squeeze(1), dim=0)
        q_hat = pool @ hq
        start = torch.log_softmax(p @ (self.w_start @ q_hat), dim=0)
        end = torch.log_softmax(p @ (self.w_end @ q_hat), dim=0)
        return start, end


@dataclass
class NeuralReaderModel:
    vocab: dict[str, int]
    config: NeuralConfig
    net: _ReaderNet
    skipped_long: int = 0
    train_losses: list[float] = field(default_factory=list)

    def ids(self, tokens: list[Token]) -> torch.Tensor:
        oov = len(self.vocab)
        out = [self.vocab.get(t.surface.lower(), oov) for t in tokens]
        if not out:
            out = [oov]
        return torch.tensor(out, dtype=torch.long)


def _init_params(net: _ReaderNet, seed: int) -> None:
    gen = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for p in net.parameters():
            p.uniform_(-0.05, 0.05, generator=gen)


def _load_pretrained(net: _ReaderNet, vocab: dict[str, int], path: str, d_emb: int) -> None:
    with open(path, encoding="utf-8") as fh:
        with torch.no_grad():
            for lineno, line in enumerate(fh, 1):
                parts = line.rstrip("\n").split(" ")
                if len(parts) != d_emb + 1:
                    raise ModelError(f"{path}: line {lineno}: expected a token and {d_emb} floats")
                idx = vocab.get(parts[0])
                if idx is not None:
                    net.embed.weight[idx] = torch.tensor(
                        [float(v) for v in parts[1:]], dtype=torch.float64
                    )


def _build_vocab(dataset: Dataset, corpus: Corpus) -> dict[str, int]:
    words = set()
    seen_docs = set()
    for pair in dataset:
        doc = corpus.get(pair.doc_id)
        if doc is not None and doc.id not in seen_docs:
            seen_docs.add(doc.id)
            words.update(t.surface.lower() for t in doc.tokens)
        words.update(t.surface.lower() for t in analyze(pair.question, corpus.config)[0])
    return {w: i for i, w in enumerate(sorted(words))}


def neural_forward(model: NeuralReaderModel, question_tokens: list[Token], context_tokens: list[Token]):
    """Probability distributions over start and end context positions."""
    if not context_tokens:
        raise ValueError("context must contain at least one token")
    with torch.no_grad():
        ls, le = model.net.log_dists(model.ids(question_tokens), model.ids(context_tokens))
    return np.exp(ls.numpy()), np.exp(le.numpy())


def _example_loss(net: _ReaderNet, q_ids, c_ids, span) -> torch.Tensor:
    ls, le = net.log_dists(q_ids, c_ids)
    s, e = span
    return -(ls[s] + le[e])


def _prepare_examples(
    model: NeuralReaderModel, dataset: Dataset, corpus: Corpus, max_context_len: int
) -> tuple[list, int]:
    missing = [p.id for p in dataset if p.gold_span is None]
    if missing:
        raise ModelError(f"pairs without gold spans cannot train the reader: {missing}")
    examples = []
    skipped = 0
    for pair in dataset:
        doc = corpus.get(pair.doc_id)
        if doc is None:
            raise ModelError(f"pair {pair.id}: unknown doc_id '{pair.doc_id}'")
        if len(doc.tokens) > max_context_len:
            skipped += 1
            continue
        q_ids = model.ids(analyze(pair.question, corpus.config)[0])
        c_ids = model.ids(doc.tokens)
        examples.append((q_ids, c_ids, pair.gold_span))
    return examples, skipped


def _optimize(net: _ReaderNet, examples: list, config: NeuralConfig) -> list[float]:
    losses: list[float] = []
    if not examples or config.epochs == 0:
        return losses
    opt = torch.optim.Adam(net.parameters(), lr=config.lr)
    for epoch in range(config.epochs):
        order = list(range(len(examples)))
        random.Random(config.seed * 1_000_003 + epoch).shuffle(order)
        total = 0.0
        for at in range(0, len(order), config.batch):
            batch = order[at : at + config.batch]
            opt.zero_grad()
            loss = sum(_example_loss(net, *examples[i]) for i in batch) / len(batch)
            loss.backward()
            torch.nn.utils.clip_grad_norm_(net.parameters(), config.grad_clip)
            opt.step()
            total += float(loss.detach()) * len(batch)
        losses.append(total / len(order))
    return losses


def train_neural(dataset: Dataset, corpus: Corpus, config: NeuralConfig) -> NeuralReaderModel:
    """Minimize summed cross-entropy of gold start/end positions with Adam
    over seeded mini-batches; pairs with contexts longer than
    max_context_len are skipped and counted on the returned model."""
    torch.set_num_threads(1)
    vocab = _build_vocab(dataset, corpus)
    net = _ReaderNet(len(vocab), config.d_emb, config.d_h)
    _init_params(net, config.seed)
    model = NeuralReaderModel(vocab=vocab, config=config, net=net)
    if config.pretrained_path:
        _load_pretrained(net, vocab, config.pretrained_path, config.d_emb)
    examples, model.skipped_long = _prepare_examples(model, dataset, corpus, config.max_context_len)
    model.train_losses = _optimize(net, examples, config)
    return model


def fine_tune_neural(
    model: NeuralReaderModel, dataset: Dataset, corpus: Corpus, config: NeuralConfig
) -> NeuralReaderModel:
    """Continue training from an existing model's parameters under a new
    optimization config; vocab is frozen, so unseen words map to the OOV
    row.  The input model is left untouched."""
    if (config.d_emb, config.d_h) != (model.config.d_emb, model.config.d_h):
        raise ModelError(
            f"fine-tune dims ({config.d_emb}, {config.d_h}) do not match the "
            f"model's ({model.config.d_emb}, {model.config.d_h})"
        )
    torch.set_num_threads(1)
    tuned = NeuralReaderModel(
        vocab=model.vocab,
        config=config,
        net=copy.deepcopy(model.net),
        skipped_long=model.skipped_long,
        train_losses=list(model.train_losses),
    )
    examples, skipped = _prepare_examples(tuned, dataset, corpus, config.max_context_len)
    tuned.skipped_long += skipped
    tuned.train_losses.extend(_optimize(tuned.net, examples, config))
    return tuned


def decode_span(start_dist, end_dist, max_span_len: int) -> tuple[int, int, float]:
    """Best (s, e) with s <= e <= s + max_span_len - 1 by start*end product;
    ties prefer the shorter span, then the earlier one."""
    n = len(start_dist)
    best_key = None
    best = None
    for s in range(n):
        for e in range(s, min(n, s + max_span_len)):
            prod = float(start_dist[s]) * float(end_dist[e])
            key = (-prod, e - s, s)
            if best_key is None or key < best_key:
                best_key = key
                best = (s, e, prod)
    return best


def neural_predict(model: NeuralReaderModel, question_tokens: list[Token], doc: Document, max_span_len: int) -> Candidate:
    start, end = neural_forward(model, question_tokens, doc.tokens)
    s, e, prod = decode_span(start, end, max_span_len)
    return Candidate(span=make_span(doc, s, e), score=prod)


def analytic_gradients(model: NeuralReaderModel, example) -> dict[str, np.ndarray]:
    """Backprop gradients of the single-example loss, keyed by parameter name."""
    q_tokens, c_tokens, span = example
    net = model.net
    net.zero_grad()
    loss = _example_loss(net, model.ids(q_tokens), model.ids(c_tokens), span)
    if not math.isfinite(float(loss.detach())):
        raise ModelError(f"non-finite loss {float(loss.detach())!r}")
    loss.backward()
    return {
        name: (p.grad.clone().numpy() if p.grad is not None else np.zeros(p.shape))
        for name, p in net.named_parameters()
    }


def numeric_gradients(model: NeuralReaderModel, example, epsilon: float) -> dict[str, np.ndarray]:
    """Central finite differences of the loss for every parameter scalar."""
    q_tokens, c_tokens, span = example
    q_ids, c_ids = model.ids(q_tokens), model.ids(c_tokens)
    net = model.net

    def loss_value() -> float:
        with torch.no_grad():
            value = float(_example_loss(net, q_ids, c_ids, span))
        if not math.isfinite(value):
            raise ModelError(f"non-finite loss {value!r}")
        return value

    out = {}
    with torch.no_grad():
        for name, p in net.named_parameters():
            grad = np.zeros(p.numel())
            flat = p.view(-1)
            for i in range(p.numel()):
                orig = float(flat[i])
                flat[i] = orig + epsilon
                up = loss_value()
                flat[i] = orig - epsilon
                down = loss_value()
                flat[i] = orig
                grad[i] = (up - down) / (2 * epsilon)
            out[name] = grad.reshape(tuple(p.shape))
    return out


def max_relative_error(grads_a: dict[str, np.ndarray], grads_b: dict[str, np.ndarray]) -> float:
    """Elementwise |a - b| / max(|a|, |b|, 1e-3), maximized over everything.

    The absolute floor keeps near-zero gradients from inflating the ratio
    with finite-difference noise.
    """
    worst = 0.0
    for name, a in grads_a.items():
        b = grads_b[name]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-3)
        worst = max(worst, float(np.max(np.abs(a - b) / denom)))
    return worst


def gradient_check(model: NeuralReaderModel, example, epsilon: float) -> float:
    """Max relative error between analytic and central-difference gradients
    on one (question_tokens, context_tokens, (start, end)) example."""
    if not 0 < epsilon <= 1e-2:
        raise ValueError("epsilon must be in (0, 1e-2]")
    torch.set_num_threads(1)
    analytic = analytic_gradients(model, example)
    numeric = numeric_gradients(model, example, epsilon)
    return max_relative_error(analytic, numeric)


def save_neural(model: NeuralReaderModel, path: str | Path) -> None:
    cfg = model.config
    torch.save(
        {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "neural",
            "config": {
                "d_emb": cfg.d_emb,
                "d_h": cfg.d_h,
                "lr": cfg.lr,
                "epochs": cfg.epochs,
                "batch": cfg.batch,
                "seed": cfg.seed,
                "max_span_len": cfg.max_span_len,
                "max_context_len": cfg.max_context_len,
                "grad_clip": cfg.grad_clip,
            },
            "vocab": model.vocab,
            "state": model.net.state_dict(),
            "skipped_long": model.skipped_long,
            "train_losses": model.train_losses,
        },
        path,
    )


def load_neural(path: str | Path) -> NeuralReaderModel:
    doc = torch.load(path, weights_only=True)
    if doc.get("format_version") != MODEL_FORMAT_VERSION or doc.get("kind") != "neural":
        raise ModelError(f"{path}: not a supported reader snapshot")
    config = NeuralConfig(**doc["config"])
    net = _ReaderNet(len(doc["vocab"]), config.d_emb, config.d_h)
    try:
        net.load_state_dict(doc["state"], strict=True)
    except RuntimeError as exc:
        raise ModelError(f"{path}: parameter shapes do not match the config: {exc}") from None
    return NeuralReaderModel(
        vocab=doc["vocab"],
        config=config,
        net=net,
        skipped_long=doc["skipped_long"],
        train_losses=list(doc["train_losses"]),
    )
