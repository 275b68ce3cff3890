"""Command-line interface: corpus tooling, training, evaluation, serving."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from ..corpus.io import load_corpus, load_dataset
from ..corpus.preprocess import english_stopwords
from ..corpus.squad import convert_squad
from ..corpus.types import PreprocessConfig
from ..errors import DocqaError, FilterError
from ..evaluation import evaluate_reader, evaluate_system, recall_at_k, relevant_docs
from ..reader.logreg import LogRegConfig, save_logreg, train_logreg
from ..reader.neural import NeuralConfig, save_neural, train_neural
from ..retrieval.filters import EMPTY_FILTER, MetadataFilter, RangeClause, ValueClause
from ..retrieval.indexes import INDEX_KINDS, build_index, save_index
from ..retrieval.ranking import retrieve_top_k
from ..transfer import fuse_and_oversample
from .engine import Engine, SystemConfig, load_system_config
from .service import _bound, create_app


def _preprocess_config() -> PreprocessConfig:
    return PreprocessConfig(stopword_list=english_stopwords())


def _corpus(args):
    return load_corpus(args.corpus, _preprocess_config())


def _engine(args) -> Engine:
    config = SystemConfig(
        corpus_path=args.corpus,
        index_kind=args.index_kind,
        reader_kind=args.reader,
        model_path=getattr(args, "model", None),
        mode=args.mode,
        k_retrieve=args.k,
        max_span_len=args.max_span_len,
    )
    return Engine.build(config)


def _parse_filters(specs: list[str], corpus) -> MetadataFilter:
    """field=value adds a categorical value; field>=bound / field<=bound set
    range endpoints (numbers, or ISO timestamps for timestamp fields)."""
    values: dict[str, set[str]] = {}
    lowers: dict[str, str] = {}
    uppers: dict[str, str] = {}
    for spec in specs or []:
        if ">=" in spec:
            field, _, raw = spec.partition(">=")
            lowers[field] = raw
        elif "<=" in spec:
            field, _, raw = spec.partition("<=")
            uppers[field] = raw
        elif "=" in spec:
            field, _, raw = spec.partition("=")
            values.setdefault(field, set()).add(raw)
        else:
            raise FilterError(f"bad filter spec {spec!r}: use field=value, field>=bound, or field<=bound")
    clauses = {}
    for field, vals in values.items():
        if field in lowers or field in uppers:
            raise FilterError(f"filter '{field}' mixes values and bounds")
        clauses[field] = ValueClause(values=frozenset(vals))
    for field in sorted(set(lowers) | set(uppers)):
        kind = corpus.schema.fields.get(field)
        if kind is None:
            raise FilterError(f"unknown filter field '{field}'")
        lower = _bound(field, kind.kind, _numeric(lowers.get(field)), "min")
        upper = _bound(field, kind.kind, _numeric(uppers.get(field)), "max")
        clauses[field] = RangeClause(lower=lower, upper=upper)
    return MetadataFilter(clauses=clauses)


def _numeric(raw: str | None):
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        return raw


def cmd_ingest(args) -> int:
    corpus = _corpus(args)
    print(f"loaded {len(corpus)} documents from {args.corpus}")
    for field, kind in sorted(corpus.schema.fields.items()):
        if kind.kind == "categorical":
            print(f"  {field}: categorical ({len(kind.values)} values)")
        else:
            print(f"  {field}: {kind.kind}")
    return 0


def cmd_index(args) -> int:
    corpus = _corpus(args)
    index = build_index(corpus, args.kind)
    save_index(index, args.out)
    print(f"indexed {len(corpus)} documents ({args.kind}) -> {args.out}")
    return 0


def _filled(args, names: list[str]) -> dict:
    out = {}
    for name in names:
        value = getattr(args, name)
        if value is not None:
            out[name] = value
    return out


def cmd_train_reader(args) -> int:
    corpus = _corpus(args)
    dataset = load_dataset(args.dataset, corpus, origin=args.origin)
    if args.kind == "logreg":
        config = LogRegConfig(**_filled(args, ["lr", "epochs", "l2", "neg_per_pos", "seed", "max_span_len"]))
        model = train_logreg(dataset, corpus, config)
        save_logreg(model, args.out)
    else:
        config = NeuralConfig(
            pretrained_path=args.pretrained,
            **_filled(args, ["d_emb", "d_h", "lr", "epochs", "batch", "seed", "max_span_len", "max_context_len"]),
        )
        model = train_neural(dataset, corpus, config)
        save_neural(model, args.out)
        if model.skipped_long:
            print(f"warning: skipped {model.skipped_long} pairs over max_context_len", file=sys.stderr)
        if model.train_losses:
            print(f"final epoch loss {model.train_losses[-1]:.4f}")
    print(f"trained {args.kind} reader on {len(dataset)} pairs -> {args.out}")
    return 0


def cmd_fuse(args) -> int:
    corpus = _corpus(args)
    source = load_dataset(args.source, corpus, origin="source")
    target = load_dataset(args.target, corpus, origin="target")
    fused = fuse_and_oversample(source, target, ratio=args.ratio, seed=args.seed)
    payload = {
        "name": fused.name,
        "fused": True,
        "provenance": {
            "source": str(args.source),
            "target": str(args.target),
            "source_pairs": len(source),
            "target_pairs": len(target),
            "ratio": fused.ratio,
            "seed": fused.shuffle_seed,
            "fused_pairs": len(fused),
        },
        "data": [
            {
                "question": p.question,
                "answers": list(p.gold_answers),
                "doc_id": p.doc_id,
                "id": p.id,
                "origin": p.origin,
            }
            for p in fused
        ],
    }
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"fused {len(source)} source + {len(target)} target x{fused.ratio} = {len(fused)} pairs -> {args.out}")
    return 0


def cmd_ask(args) -> int:
    engine = _engine(args)
    metadata_filter = _parse_filters(args.filter, engine.corpus)
    response = engine.ask(args.question, metadata_filter=metadata_filter)
    payload = asdict(response)
    payload["retrieved"] = [{"doc_id": d, "score": s} for d, s in response.retrieved]
    print(json.dumps(payload, indent=2))
    return 0


def cmd_eval_ir(args) -> int:
    corpus = _corpus(args)
    dataset = load_dataset(args.dataset, corpus, origin=args.origin)
    index = build_index(corpus, args.index_kind)
    ks = sorted(int(k) for k in args.k.split(","))
    sums = {k: 0 for k in ks}
    for pair in dataset:
        ranked = retrieve_top_k(index, pair.question, EMPTY_FILTER, max(ks))
        rel = relevant_docs(corpus, pair)
        for k in ks:
            sums[k] += recall_at_k(ranked, rel, k)
    print(f"kind={args.index_kind} n={len(dataset)}")
    print("k\trecall@k")
    for k in ks:
        print(f"{k}\t{sums[k] / len(dataset):.3f}")
    return 0


def cmd_eval_reader(args) -> int:
    engine = _engine(args)
    dataset = load_dataset(args.dataset, engine.corpus, origin=args.origin)
    report = evaluate_reader(lambda q, doc: engine.read(q, doc).span.text, dataset, engine.corpus)
    print(f"reader={args.reader} n={report.n}")
    print(f"em\t{report.em:.3f}")
    print(f"f1\t{report.f1:.3f}")
    return 0


def cmd_eval_e2e(args) -> int:
    engine = _engine(args)
    dataset = load_dataset(args.dataset, engine.corpus, origin=args.origin)
    ks = sorted(int(k) for k in args.recall_k.split(",")) if args.recall_k else []
    report = evaluate_system(engine, dataset, ks)
    print(f"reader={args.reader} index={args.index_kind} mode={args.mode} n={report.n}")
    print(f"em\t{report.em:.3f}")
    print(f"f1\t{report.f1:.3f}")
    for k in ks:
        print(f"recall@{k}\t{report.recall_at[k]:.3f}")
    return 0


def cmd_convert_squad(args) -> int:
    n_docs, n_pairs = convert_squad(args.squad, args.corpus_out, args.dataset_out)
    print(f"converted {n_docs} paragraphs and {n_pairs} pairs")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    if args.config:
        config = load_system_config(args.config)
    else:
        if args.corpus is None:
            raise ValueError("serve needs --config or --corpus")
        config = SystemConfig(
            corpus_path=args.corpus,
            index_kind=args.index_kind,
            reader_kind=args.reader,
            model_path=args.model,
            mode=args.mode,
            k_retrieve=args.k,
            max_span_len=args.max_span_len,
            port=args.port,
        )
    engine = Engine.build(config)
    app = create_app(engine)
    uvicorn.run(app, host=args.host, port=config.port)
    return 0


def _add_corpus_arg(parser) -> None:
    parser.add_argument("--corpus", required=True, help="corpus JSONL path")


def _add_engine_args(parser, mode_default="best_fit") -> None:
    parser.add_argument("--index-kind", default="bm25", choices=INDEX_KINDS)
    parser.add_argument("--reader", default="sliding", choices=["sliding", "logreg", "neural"])
    parser.add_argument("--model", default=None, help="trained reader snapshot path")
    parser.add_argument("--mode", default=mode_default, choices=["best_fit", "multi_doc"])
    parser.add_argument("--k", type=int, default=None, help="documents to retrieve")
    parser.add_argument("--max-span-len", type=int, default=15)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="docqa", description="metadata-filtered document question answering")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and validate a corpus, print its schema")
    _add_corpus_arg(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="build and save a retrieval index")
    _add_corpus_arg(p)
    p.add_argument("--kind", default="bm25", choices=INDEX_KINDS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("train-reader", help="train a span reader on a dataset")
    _add_corpus_arg(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--origin", default="source", choices=["source", "target"])
    p.add_argument("--kind", default="logreg", choices=["logreg", "neural"])
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--l2", type=float, default=None)
    p.add_argument("--neg-per-pos", type=int, default=None)
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("--d-emb", type=int, default=None)
    p.add_argument("--d-h", type=int, default=None)
    p.add_argument("--max-span-len", type=int, default=None)
    p.add_argument("--max-context-len", type=int, default=None)
    p.add_argument("--pretrained", default=None, help="pretrained embedding text file")
    p.set_defaults(func=cmd_train_reader)

    p = sub.add_parser("fuse", help="fuse source and target datasets with target oversampling")
    _add_corpus_arg(p)
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--ratio", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("ask", help="answer one question")
    _add_corpus_arg(p)
    _add_engine_args(p)
    p.add_argument("--question", required=True)
    p.add_argument("--filter", action="append", default=[], help="field=value or field>=bound / field<=bound")
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("eval-ir", help="recall@k of unfiltered retrieval over a dataset")
    _add_corpus_arg(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--origin", default="source", choices=["source", "target"])
    p.add_argument("--index-kind", default="bm25", choices=INDEX_KINDS)
    p.add_argument("--k", default="1,3,5", help="comma-separated cutoffs")
    p.set_defaults(func=cmd_eval_ir)

    p = sub.add_parser("eval-reader", help="reader EM/F1 on gold documents")
    _add_corpus_arg(p)
    _add_engine_args(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--origin", default="source", choices=["source", "target"])
    p.set_defaults(func=cmd_eval_reader)

    p = sub.add_parser("eval-e2e", help="end-to-end EM/F1 with retrieval in the loop")
    _add_corpus_arg(p)
    _add_engine_args(p, mode_default="multi_doc")
    p.add_argument("--dataset", required=True)
    p.add_argument("--origin", default="source", choices=["source", "target"])
    p.add_argument("--recall-k", default="1,3,5", help="comma-separated recall cutoffs, empty to skip")
    p.set_defaults(func=cmd_eval_e2e)

    p = sub.add_parser("convert-squad", help="convert a SQuAD-format file to corpus + dataset")
    p.add_argument("--squad", required=True)
    p.add_argument("--corpus-out", required=True)
    p.add_argument("--dataset-out", required=True)
    p.set_defaults(func=cmd_convert_squad)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", default=None, help="SystemConfig JSON file")
    p.add_argument("--corpus", default=None)
    _add_engine_args(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8076)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DocqaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
