"""One-pass converter from SQuAD-format JSON to our corpus/dataset files."""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import DatasetError


def convert_squad(squad_path: str | Path, corpus_out: str | Path, dataset_out: str | Path) -> tuple[int, int]:
    """Write one corpus doc per paragraph and one dataset item per question.

    Article titles become both the doc title and a categorical "title"
    metadata field.  Unanswerable questions (empty answer list) are skipped.
    Returns (documents written, pairs written).
    """
    with open(squad_path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{squad_path}: invalid JSON ({exc.msg})") from None
    articles = obj.get("data")
    if not isinstance(articles, list):
        raise DatasetError(f"{squad_path}: expected an object with a 'data' list")
    items = []
    n_docs = 0
    with open(corpus_out, "w", encoding="utf-8") as fh:
        for a, article in enumerate(articles):
            title = article.get("title") or f"article{a}"
            for p, para in enumerate(article.get("paragraphs", [])):
                doc_id = f"{title}#{p}"
                fh.write(
                    json.dumps(
                        {
                            "id": doc_id,
                            "title": title.replace("_", " "),
                            "text": para["context"],
                            "metadata": {"title": title},
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
                n_docs += 1
                for qa in para.get("qas", []):
                    answers = list(dict.fromkeys(ans["text"] for ans in qa.get("answers", [])))
                    if not answers:
                        continue
                    item = {
                        "question": qa["question"],
                        "answers": answers,
                        "doc_id": doc_id,
                        "answer_start": qa["answers"][0]["answer_start"],
                    }
                    if qa.get("id"):
                        item["id"] = qa["id"]
                    items.append(item)
    with open(dataset_out, "w", encoding="utf-8") as fh:
        json.dump({"data": items}, fh, ensure_ascii=False)
    return n_docs, len(items)
