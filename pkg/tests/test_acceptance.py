"""Acceptance suite: one test per release criterion.

Each test prints a single PASS line with its headline numbers (visible
under pytest -s); the pytest -v status line is the pass/fail verdict.
Criteria with a runtime budget assert wall time too.
"""

import json
import math
import random
import statistics
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
import torch

from docqa.corpus.io import load_corpus
from docqa.corpus.preprocess import analyze, preprocess
from docqa.corpus.types import Dataset, PreprocessConfig, QAPair
from docqa.evaluation import evaluate_reader, evaluate_system, exact_match, f1_score, mcnemar_exact
from docqa.pipeline.engine import Engine
from docqa.reader.logreg import LogRegConfig, train_logreg
from docqa.reader.neural import NeuralConfig, decode_span, gradient_check, neural_predict, train_neural
from docqa.retrieval.filters import EMPTY_FILTER, MetadataFilter, ValueClause
from docqa.retrieval.hashing import hashed_counts
from docqa.retrieval.indexes import build_index, score_bigram, score_bm25, score_cosine
from docqa.retrieval.ranking import retrieve_top_k
from docqa.transfer import default_schedule, fine_tune_neural, fuse_and_oversample, train_fused

CFG = PreprocessConfig(stemming_enabled=True)


def make_corpus(tmp_path, entries, name="corpus.jsonl"):
    path = tmp_path / name
    with open(path, "w") as fh:
        for i, entry in enumerate(entries):
            if isinstance(entry, str):
                entry = {"id": f"d{i:03d}", "title": "", "text": entry, "metadata": {}}
            fh.write(json.dumps(entry) + "\n")
    return load_corpus(path, CFG)


def stems_of(text):
    return [t.stem for t in preprocess(text, CFG)]


# 1. Answer metrics against hand-computed rational values.
#
# Every non-trivial F1 uses normalized token counts whose precision and
# recall are exact binary floats, so the float formula 2pr/(p+r) is the
# correctly rounded rational and == against float(Fraction) is sound.
METRIC_TABLE = [
    ("Turkey", ["Turkey"], 1, Fraction(1)),
    ("in Turkey", ["Turkey"], 0, Fraction(2, 3)),
    ("The Ottoman Empire", ["ottoman empire"], 1, Fraction(1)),
    ("Istanbul.", ["Istanbul"], 1, Fraction(1)),
    ("the 397 million", ["$397 million."], 1, Fraction(1)),
    ("397", ["$397 million"], 0, Fraction(2, 3)),
    ("five hundred", ["five"], 0, Fraction(2, 3)),
    ("north south east west", ["north south"], 0, Fraction(2, 3)),
    ("north south", ["north south east west"], 0, Fraction(2, 3)),
    ("alpha beta", ["gamma delta"], 0, Fraction(0)),
    ("", ["answer"], 0, Fraction(0)),
    ("An apple", ["apple"], 1, Fraction(1)),
    ("apple pie", ["apple tart", "apple pie"], 1, Fraction(1)),
    ("apple tart crumble pie", ["apple pie"], 0, Fraction(2, 3)),
    ("one two three four", ["one two three four five six seven eight"], 0, Fraction(2, 3)),
    ("w x", ["w y"], 0, Fraction(1, 2)),
    ("p x y z", ["p q"], 0, Fraction(1, 3)),
    ("m n o p", ["m n o p"], 1, Fraction(1)),
    ("m n o p", ["m n o q"], 0, Fraction(3, 4)),
    ("repeat repeat", ["repeat"], 0, Fraction(2, 3)),
    ("repeat repeat", ["repeat repeat repeat repeat"], 0, Fraction(2, 3)),
    ("The the the an", ["a an the"], 1, Fraction(1)),
    ("x", ["a an the"], 0, Fraction(0)),
    ("İstanbul", ["istanbul"], 1, Fraction(1)),
    ("  spaced   out  ", ["spaced out"], 1, Fraction(1)),
    ("k l m n", ["k l m o p q r s"], 0, Fraction(1, 2)),
    ("42!", ["42"], 1, Fraction(1)),
    ("Forty Two", ["forty-two"], 0, Fraction(0)),
]


def test_metric_oracles():
    t0 = time.perf_counter()
    assert len(METRIC_TABLE) >= 20
    for pred, golds, want_em, want_f1 in METRIC_TABLE:
        assert exact_match(pred, golds) == want_em, (pred, golds)
        assert f1_score(pred, golds) == float(want_f1), (pred, golds)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"\nPASS metric oracles: {len(METRIC_TABLE)} hand-computed pairs exact in {elapsed:.3f}s")


# 2. Retrieval scorers against dense brute-force oracles.


def dense_cosine(docs, query_stems):
    n = len(docs)
    df = Counter()
    for _, stems in docs:
        df.update(set(stems))
    idf = {t: math.log(n / c) for t, c in df.items()}

    def weights(stems):
        c = Counter(t for t in stems if t in idf)
        return {t: k * idf[t] for t, k in c.items()}

    q = weights(query_stems)
    qn = math.sqrt(sum(w * w for w in q.values()))
    out = {}
    for doc_id, stems in docs:
        d = weights(stems)
        dn = math.sqrt(sum(w * w for w in d.values()))
        dot = sum(w * d.get(t, 0.0) for t, w in q.items())
        out[doc_id] = 0.0 if qn == 0 or dn == 0 else dot / (qn * dn)
    return out


def dense_bm25(docs, query_stems, k1=1.5, b=0.75):
    n = len(docs)
    df = Counter()
    for _, stems in docs:
        df.update(set(stems))
    lens = {doc_id: len(stems) for doc_id, stems in docs}
    avg = sum(lens.values()) / n
    out = {}
    for doc_id, stems in docs:
        c = Counter(stems)
        s = 0.0
        for t in query_stems:
            tf = c.get(t, 0)
            if tf == 0:
                continue
            idf = math.log((n - df[t] + 0.5) / (df[t] + 0.5) + 1.0)
            s += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * lens[doc_id] / avg))
        out[doc_id] = s
    return out


def dense_bigram(docs, query_stems):
    n = len(docs)
    per_doc = {doc_id: hashed_counts(stems) for doc_id, stems in docs}
    df = Counter()
    for counts in per_doc.values():
        df.update(set(counts))
    idf = {h: math.log(n / c) for h, c in df.items()}
    q = {h: c * idf[h] for h, c in hashed_counts(query_stems).items() if h in idf}
    out = {}
    for doc_id, counts in per_doc.items():
        out[doc_id] = sum(w * counts.get(h, 0) * idf[h] for h, w in q.items())
    return out


def test_ir_brute_force_equivalence(tmp_path):
    t0 = time.perf_counter()
    rng = random.Random(42)
    vocab = [f"term{i}" for i in range(25)]
    texts = [" ".join(rng.choice(vocab) for _ in range(rng.randrange(3, 25))) for _ in range(16)]
    corpus = make_corpus(tmp_path, texts)
    docs = [(doc.id, [t.stem for t in doc.ir_tokens]) for doc in corpus]
    cosine = build_index(corpus, "vector_space")
    bm25 = build_index(corpus, "bm25")
    bigram = build_index(corpus, "bigram_hashed")
    queries = [" ".join(rng.choice(vocab) for _ in range(rng.randrange(1, 6))) for _ in range(20)]
    for query in queries:
        stems = stems_of(query)
        for got, want, tol in [
            (score_cosine(cosine, stems), dense_cosine(docs, stems), 1e-9),
            (score_bm25(bm25, stems), dense_bm25(docs, stems), 1e-6),
            (score_bigram(bigram, stems), dense_bigram(docs, stems), 1e-9),
        ]:
            assert set(got) == set(want)
            for doc_id in want:
                assert abs(got[doc_id] - want[doc_id]) < tol, (query, doc_id)
    for doc in corpus:
        ranked = retrieve_top_k(cosine, doc.text, EMPTY_FILTER, 1)
        assert ranked.entries[0][0] == doc.id
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"\nPASS ir brute force: 3 scorers x {len(queries)} queries x 16 docs, self-query first, {elapsed:.3f}s")


# 3. Metadata filtering improves recall on an ambiguous corpus: 100 groups
# of 10 near-duplicate docs that only metadata tells apart.


def test_filter_effect(tmp_path):
    t0 = time.perf_counter()
    rng = random.Random(7)
    pool = [f"w{i}" for i in range(400)]
    categories = [f"cat{j}" for j in range(10)]
    entries = []
    group_tokens = []
    doc_category = {}
    for g in range(100):
        tokens = rng.sample(pool, 6)
        group_tokens.append(tokens)
        cats = rng.sample(categories, 10)
        for j in range(10):
            doc_id = f"d{g}x{j}"
            body = tokens + [f"uq{g}x{j}a", f"uq{g}x{j}b"]
            rng.shuffle(body)
            entries.append({"id": doc_id, "title": "", "text": " ".join(body), "metadata": {"category": cats[j]}})
            doc_category[doc_id] = cats[j]
    corpus = make_corpus(tmp_path, entries)
    index = build_index(corpus, "bm25")

    ks = [1, 3, 5]
    sums = {"filtered": {k: 0 for k in ks}, "unfiltered": {k: 0 for k in ks}}
    for _ in range(200):
        g = rng.randrange(100)
        j = rng.randrange(10)
        relevant = f"d{g}x{j}"
        query = " ".join(group_tokens[g])
        flt = MetadataFilter(clauses={"category": ValueClause(values=frozenset({doc_category[relevant]}))})
        for setting, metadata_filter in [("filtered", flt), ("unfiltered", EMPTY_FILTER)]:
            ranked = retrieve_top_k(index, query, metadata_filter, max(ks))
            ids = [doc_id for doc_id, _ in ranked.entries]
            for k in ks:
                sums[setting][k] += int(relevant in ids[:k])
    recall = {s: {k: v / 200 for k, v in per.items()} for s, per in sums.items()}
    assert recall["filtered"][1] > recall["unfiltered"][1]
    for setting in recall:
        assert recall[setting][1] <= recall[setting][3] <= recall[setting][5]
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    print(
        f"\nPASS filter effect: recall@1 {recall['unfiltered'][1]:.3f} -> {recall['filtered'][1]:.3f} "
        f"with filter, monotone in k, {elapsed:.1f}s"
    )


# 4. Fusion produces the exact oversampled multiset, reproducibly.


def test_fusion_counts():
    source = Dataset(
        pairs=[QAPair(question=f"q{i}", gold_answers=["a"], doc_id="d", origin="source", id=f"s{i}") for i in range(10)],
        name="big",
    )
    target = Dataset(
        pairs=[QAPair(question=f"t{i}", gold_answers=["a"], doc_id="d", origin="target", id=f"t{i}") for i in range(2)],
        name="small",
    )
    fused = fuse_and_oversample(source, target, ratio=3, seed=5)
    assert len(fused) == 16
    counts = Counter(p.id for p in fused)
    assert all(counts[f"s{i}"] == 1 for i in range(10))
    assert all(counts[f"t{i}"] == 3 for i in range(2))
    again = fuse_and_oversample(source, target, ratio=3, seed=5)
    assert [p.id for p in fused] == [p.id for p in again]
    print("\nPASS fusion counts: 10 + 3*2 = 16 pairs, order bit-reproducible")


# 5. Analytic gradients against central finite differences.


def test_gradient_check(tmp_path):
    t0 = time.perf_counter()
    corpus = make_corpus(tmp_path, ["north ridge camp holds one old lantern"])
    doc = corpus.get("d000")
    question = "where is the lantern kept"
    pair = QAPair(question=question, gold_answers=["ridge camp"], doc_id="d000", gold_span=(1, 2), id="p0")
    dataset = Dataset(pairs=[pair], name="tiny")
    worst = 0.0
    for seed in range(5):
        config = NeuralConfig(d_emb=4, d_h=3, epochs=0, seed=seed, max_context_len=30)
        model = train_neural(dataset, corpus, config)
        gen = torch.Generator().manual_seed(1000 + seed)
        with torch.no_grad():
            for p in model.net.parameters():
                p.uniform_(-0.8, 0.8, generator=gen)
        example = (analyze(question, CFG)[0], doc.tokens, (1, 2))
        err = gradient_check(model, example, 1e-4)
        assert err < 1e-4, seed
        worst = max(worst, err)
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    print(f"\nPASS gradient check: 5 seeds, max relative error {worst:.2e} < 1e-4, {elapsed:.1f}s")


# 6. McNemar exact p-value and symmetry.


def test_mcnemar_exact():
    p = mcnemar_exact(10, 2)
    assert abs(p - 158 / 4096) < 1e-9
    rng = random.Random(11)
    checked = 0
    for b in range(0, 13):
        for c in range(0, 13):
            if b == c == 0:
                continue
            assert mcnemar_exact(b, c) == mcnemar_exact(c, b)
            checked += 1
    for _ in range(200):
        b, c = rng.randrange(0, 200), rng.randrange(0, 200)
        if b == c == 0:
            continue
        assert mcnemar_exact(b, c) == mcnemar_exact(c, b)
        assert 0.0 < mcnemar_exact(b, c) <= 1.0
        checked += 1
    print(f"\nPASS mcnemar exact: p(10,2) = 158/4096, symmetry on {checked} pairs")


# 7. Constrained span decoding against brute-force enumeration.


def brute_force_decode(start, end, max_span_len):
    best_key, best = None, None
    for s in range(len(start)):
        for e in range(s, min(len(end), s + max_span_len)):
            prod = float(start[s]) * float(end[e])
            key = (-prod, e - s, s)
            if best_key is None or key < best_key:
                best_key, best = key, (s, e, prod)
    return best


def test_decoding_oracle():
    rng = np.random.default_rng(3)
    for trial in range(100):
        n = int(rng.integers(1, 31))
        start = rng.dirichlet(np.ones(n))
        end = rng.dirichlet(np.ones(n))
        max_span_len = int(rng.integers(1, n + 1))
        got = decode_span(start, end, max_span_len)
        want = brute_force_decode(start, end, max_span_len)
        assert got == want, trial
    print("\nPASS decoding oracle: 100 random distributions, contexts <= 30 tokens")


# 8. End-to-end EM never beats the reader on its annotated documents.
# Every answer token is unique to its document, so a hit requires both
# fetching the right document and extracting the right span.


def build_qa_world(tmp_path):
    rng = random.Random(19)
    common = [f"c{i}" for i in range(12)]
    entries = []
    pairs = []
    for i in range(25):
        body = rng.sample(common, 5)
        p = rng.randrange(0, len(body) + 1)
        tokens = body[:p] + [f"key{i}", f"ans{i}"] + body[p:]
        doc_id = f"d{i:03d}"
        entries.append({"id": doc_id, "title": "", "text": " ".join(tokens), "metadata": {}})
        pairs.append(
            QAPair(
                question=f"which value follows key{i}",
                gold_answers=[f"ans{i}"],
                doc_id=doc_id,
                gold_span=(p + 1, p + 1),
                id=f"q{i}",
            )
        )
    corpus = make_corpus(tmp_path, entries)
    return corpus, Dataset(pairs=pairs, name="synthetic")


def test_e2e_upper_bound(tmp_path):
    corpus, dataset = build_qa_world(tmp_path)
    models = {
        "sliding": None,
        "logreg": train_logreg(dataset, corpus, LogRegConfig(epochs=40, seed=0, max_span_len=3)),
        "neural": train_neural(
            dataset, corpus, NeuralConfig(d_emb=8, d_h=6, lr=8e-3, epochs=10, batch=8, seed=0, max_span_len=3)
        ),
    }
    runs = []
    for index_kind in ("vector_space", "bm25", "bigram_hashed"):
        index = build_index(corpus, index_kind)
        for reader_kind, model in models.items():
            for mode, k in [("best_fit", 1), ("multi_doc", 3)]:
                engine = Engine(
                    corpus, index, reader_kind=reader_kind, model=model, mode=mode, k_retrieve=k, max_span_len=3
                )
                reader_em = evaluate_reader(lambda q, d: engine.read(q, d).span.text, dataset, corpus).em
                e2e_em = evaluate_system(engine, dataset).em
                assert e2e_em <= reader_em, (index_kind, reader_kind, mode)
                runs.append((index_kind, reader_kind, mode, e2e_em, reader_em))
    worst_gap = min(r - e for _, _, _, e, r in runs)
    print(f"\nPASS e2e upper bound: {len(runs)} runs, e2e EM <= oracle-document EM (min slack {worst_gap:.3f})")


# 9. Transfer direction on a synthetic task: answer always follows the
# token named by the question, content vocabulary shifted between domains.
# Target-only starves (300 pairs), a frozen source vocabulary cripples
# fine-tuning on the shifted words, and fusion sees both domains end to end.

SHARED_WORDS = [f"com{i}" for i in range(30)]
SOURCE_WORDS = [f"sw{i}" for i in range(30)]
TARGET_WORDS = [f"tw{i}" for i in range(60)]
TRANSFER_DOC_LEN = 7


def transfer_pairs(rng, n, domain, new_words, n_new, start_index):
    entries, pairs = [], []
    for i in range(n):
        body = rng.sample(SHARED_WORDS, TRANSFER_DOC_LEN - n_new) + rng.sample(new_words, n_new)
        rng.shuffle(body)
        p = rng.randrange(0, TRANSFER_DOC_LEN - 1)
        doc_id = f"{domain}{start_index + i}"
        entries.append({"id": doc_id, "title": "", "text": " ".join(body), "metadata": {}})
        pairs.append(
            QAPair(
                question=f"after {body[p]}",
                gold_answers=[body[p + 1]],
                doc_id=doc_id,
                gold_span=(p + 1, p + 1),
                origin="target" if domain == "t" else "source",
                id=doc_id,
            )
        )
    return entries, pairs


def test_transfer_direction(tmp_path):
    t0 = time.perf_counter()
    rng = random.Random(0)
    src_entries, src_pairs = transfer_pairs(rng, 5000, "s", SOURCE_WORDS, 1, 0)
    train_entries, train_pairs = transfer_pairs(rng, 300, "t", TARGET_WORDS, 5, 0)
    test_entries, test_pairs = transfer_pairs(rng, 200, "t", TARGET_WORDS, 5, 300)
    corpus = make_corpus(tmp_path, src_entries + train_entries + test_entries)
    source = Dataset(pairs=src_pairs, name="source")
    target = Dataset(pairs=train_pairs, name="target")
    test = Dataset(pairs=test_pairs, name="target-test")

    def em_of(model):
        def predict(question, doc):
            q_tokens, _ = analyze(question, corpus.config)
            return neural_predict(model, q_tokens, doc, model.config.max_span_len).span.text

        return evaluate_reader(predict, test, corpus).em

    def config(seed):
        return NeuralConfig(
            d_emb=12, d_h=10, lr=8e-3, epochs=2, batch=8, seed=seed, max_span_len=3, max_context_len=30
        )

    em = {key: [] for key in ("target_only", "fuse_r3", "fuse_r1", "source_only", "fine_tune")}
    for seed in (0, 1, 2):
        em["target_only"].append(em_of(train_neural(target, corpus, config(seed))))
        em["fuse_r3"].append(
            em_of(train_fused("neural", fuse_and_oversample(source, target, 3, seed), corpus, config(seed)))
        )
        em["fuse_r1"].append(
            em_of(train_fused("neural", fuse_and_oversample(source, target, 1, seed), corpus, config(seed)))
        )
        stage1 = train_neural(source, corpus, config(seed))
        em["source_only"].append(em_of(stage1))
        em["fine_tune"].append(em_of(fine_tune_neural(stage1, target, corpus, default_schedule(config(seed)).stage2)))

    med = {key: statistics.median(values) for key, values in em.items()}
    assert med["fuse_r3"] > med["target_only"]
    assert med["fuse_r3"] >= med["fine_tune"]
    assert med["fine_tune"] >= med["target_only"]
    assert med["fuse_r3"] >= med["fuse_r1"]
    for ft, src in zip(em["fine_tune"], em["source_only"]):
        assert ft >= src
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    print(
        f"\nPASS transfer direction: median EM fuse {med['fuse_r3']:.3f} > target-only "
        f"{med['target_only']:.3f}, >= fine-tune {med['fine_tune']:.3f}, {elapsed:.0f}s"
    )
