from .io import find_answer_span, infer_schema, load_corpus, load_dataset, parse_timestamp
from .porter import stem
from .preprocess import analyze, english_stopwords, preprocess, tokenize
from .squad import convert_squad
from .types import (
    Corpus,
    Dataset,
    Document,
    FieldKind,
    MetadataSchema,
    PreprocessConfig,
    QAPair,
    Token,
)

__all__ = [
    "Corpus",
    "Dataset",
    "Document",
    "FieldKind",
    "MetadataSchema",
    "PreprocessConfig",
    "QAPair",
    "Token",
    "analyze",
    "convert_squad",
    "english_stopwords",
    "find_answer_span",
    "infer_schema",
    "load_corpus",
    "load_dataset",
    "parse_timestamp",
    "preprocess",
    "stem",
    "tokenize",
]
