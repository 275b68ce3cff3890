"""End-to-end question answering: filter, retrieve, read.

The engine is immutable after construction; concurrent callers share one
instance safely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from ..corpus.io import load_corpus
from ..corpus.preprocess import analyze, english_stopwords
from ..corpus.types import Corpus, Document, PreprocessConfig
from ..errors import CorpusError, ModelError, NoCandidateDocumentsError
from ..reader.logreg import LogRegModel, load_logreg, logreg_answer
from ..reader.neural import NeuralReaderModel, load_neural, neural_predict
from ..reader.sliding import SlidingWindowConfig, sliding_window_candidate
from ..reader.spans import Candidate
from ..retrieval.filters import EMPTY_FILTER, MetadataFilter
from ..retrieval.indexes import INDEX_KINDS, build_index, load_index
from ..retrieval.ranking import RankedList, retrieve_top_k

READER_KINDS = ("sliding", "logreg", "neural")
MODES = ("best_fit", "multi_doc")


@dataclass(frozen=True)
class SystemConfig:
    corpus_path: str
    index_kind: str = "bm25"
    index_path: str | None = None
    reader_kind: str = "sliding"
    model_path: str | None = None
    mode: str = "best_fit"
    k_retrieve: int | None = None
    max_span_len: int = 15
    window_pad: int = 5
    lowercase: bool = True
    stemming: bool = True
    port: int = 8076

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.reader_kind not in READER_KINDS:
            raise ValueError(f"reader_kind must be one of {READER_KINDS}, got {self.reader_kind!r}")
        if self.index_kind not in INDEX_KINDS:
            raise ValueError(f"index_kind must be one of {INDEX_KINDS}, got {self.index_kind!r}")
        if self.mode == "best_fit" and self.k_retrieve not in (None, 1):
            raise ValueError("best_fit mode retrieves exactly one document; k_retrieve must be 1")
        if self.reader_kind in ("logreg", "neural") and not self.model_path:
            raise ValueError(f"reader_kind {self.reader_kind!r} needs a model_path")

    @property
    def effective_k(self) -> int:
        if self.k_retrieve is not None:
            return self.k_retrieve
        return 1 if self.mode == "best_fit" else 5

    def preprocess_config(self) -> PreprocessConfig:
        return PreprocessConfig(
            stopword_list=english_stopwords(),
            stemming_enabled=self.stemming,
            lowercase=self.lowercase,
        )


def load_system_config(path: str | Path) -> SystemConfig:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a flat JSON object")
    known = {f.name for f in fields(SystemConfig)}
    unknown = sorted(set(obj) - known)
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {unknown}")
    return SystemConfig(**obj)


@dataclass(frozen=True)
class AskResponse:
    answer_text: str
    doc_id: str
    char_start: int
    char_end: int
    reader_score: float
    retrieved: list[tuple[str, float]]


class Engine:
    """Shared immutable pipeline state plus the ask/retrieve/read entry
    points.  answer() gives just the text, which is what the evaluation
    harness consumes."""

    def __init__(
        self,
        corpus: Corpus,
        index,
        reader_kind: str = "sliding",
        model: LogRegModel | NeuralReaderModel | None = None,
        mode: str = "best_fit",
        k_retrieve: int | None = None,
        max_span_len: int = 15,
        window_pad: int = 5,
    ):
        if reader_kind not in READER_KINDS:
            raise ValueError(f"reader_kind must be one of {READER_KINDS}, got {reader_kind!r}")
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        if reader_kind in ("logreg", "neural") and model is None:
            raise ModelError(f"reader_kind {reader_kind!r} needs a trained model")
        self.corpus = corpus
        self.index = index
        self.reader_kind = reader_kind
        self.model = model
        self.mode = mode
        self.k_retrieve = k_retrieve if k_retrieve is not None else (1 if mode == "best_fit" else 5)
        self.max_span_len = max_span_len
        self.window_pad = window_pad

    @classmethod
    def build(cls, config: SystemConfig) -> "Engine":
        if not Path(config.corpus_path).exists():
            raise CorpusError(f"corpus file not found: {config.corpus_path}")
        corpus = load_corpus(config.corpus_path, config.preprocess_config())
        if config.index_path:
            if not Path(config.index_path).exists():
                raise ModelError(f"index file not found: {config.index_path}")
            index = load_index(config.index_path, corpus)
        else:
            index = build_index(corpus, config.index_kind)
        model = None
        if config.reader_kind == "logreg":
            if not Path(config.model_path).exists():
                raise ModelError(f"model file not found: {config.model_path}")
            model = load_logreg(config.model_path)
        elif config.reader_kind == "neural":
            if not Path(config.model_path).exists():
                raise ModelError(f"model file not found: {config.model_path}")
            model = load_neural(config.model_path)
        return cls(
            corpus=corpus,
            index=index,
            reader_kind=config.reader_kind,
            model=model,
            mode=config.mode,
            k_retrieve=config.effective_k,
            max_span_len=config.max_span_len,
            window_pad=config.window_pad,
        )

    def retrieve(self, question: str, k: int | None = None, metadata_filter: MetadataFilter = EMPTY_FILTER) -> RankedList:
        return retrieve_top_k(self.index, question, metadata_filter, k or self.k_retrieve)

    def read(self, question: str, doc: Document) -> Candidate:
        """Run the configured reader on one document."""
        q_tokens = analyze(question, self.corpus.config)[0]
        if self.reader_kind == "sliding":
            config = SlidingWindowConfig(
                max_span_len=self.max_span_len,
                window_pad=self.window_pad,
                stopwords=self.corpus.config.stopword_list,
            )
            return sliding_window_candidate(q_tokens, doc, config)
        if self.reader_kind == "logreg":
            return logreg_answer(self.model, q_tokens, doc)
        return neural_predict(self.model, q_tokens, doc, self.max_span_len)

    def ask(
        self,
        question: str,
        metadata_filter: MetadataFilter = EMPTY_FILTER,
        k: int | None = None,
        mode: str | None = None,
    ) -> AskResponse:
        """best_fit reads the top-ranked document; multi_doc reads each of
        the top k and keeps the candidate with the highest reader score
        (span scores are compared raw across documents)."""
        mode = mode or self.mode
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        k = k or (self.k_retrieve if mode == self.mode else (1 if mode == "best_fit" else 5))
        ranked = self.retrieve(question, k=k, metadata_filter=metadata_filter)
        if not len(ranked):
            raise NoCandidateDocumentsError("no candidate documents: the filter removed every document")
        to_read = ranked.entries[:1] if mode == "best_fit" else ranked.entries
        best: Candidate | None = None
        best_key = None
        best_doc = None
        for rank_pos, (doc_id, _) in enumerate(to_read):
            doc = self.corpus.get(doc_id)
            cand = self.read(question, doc)
            key = (-cand.score, rank_pos)
            if best_key is None or key < best_key:
                best_key = key
                best = cand
                best_doc = doc
        span = best.span
        char_start = best_doc.tokens[span.token_start].char_start
        char_end = best_doc.tokens[span.token_end].char_end
        return AskResponse(
            answer_text=span.text,
            doc_id=best_doc.id,
            char_start=char_start,
            char_end=char_end,
            reader_score=best.score,
            retrieved=list(ranked.entries),
        )

    def answer(self, question: str, metadata_filter: MetadataFilter = EMPTY_FILTER) -> str:
        return self.ask(question, metadata_filter=metadata_filter).answer_text
