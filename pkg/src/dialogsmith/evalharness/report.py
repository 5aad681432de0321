"""Accuracy reports and the published-comparison table.

The reference columns are the published accuracies this harness is meant
to sit next to; they are transcribed once here as strings (so "69.0" stays
"69.0") and rendered verbatim.  A missing published cell renders as "-".
Local results are appended as extra columns labeled by model id, marked
"(local)" to keep them visually distinct from the as-published numbers,
whose harness details (exemplars, normalization) are not public.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction


@dataclass
class EvalReport:
    benchmark: str
    n_items: int
    n_correct: int
    accuracy: Fraction
    k: int
    config_hash: str = ""
    model_id: str = "model"

    def validate(self) -> None:
        if self.accuracy != Fraction(self.n_correct, self.n_items):
            raise ValueError("accuracy is not exactly n_correct/n_items")

    def pct(self) -> str:
        return f"{float(self.accuracy) * 100:.1f}"

    def as_dict(self) -> dict:
        return {
            "benchmark": self.benchmark,
            "n_items": self.n_items,
            "n_correct": self.n_correct,
            "accuracy": f"{self.n_correct}/{self.n_items}",
            "accuracy_pct": self.pct(),
            "k": self.k,
            "config_hash": self.config_hash,
            "model_id": self.model_id,
        }


BENCHMARK_ROWS = [
    "MMLU Anatomy",
    "MMLU Clinical Knowledge",
    "MMLU College Biology",
    "MMLU College Medicine",
    "MMLU Medical Genetics",
    "MMLU Professional Medicine",
    "MedMCQA",
    "MedQA (USMLE)",
    "PubMedQA",
    "USMLE Sample Exam",
]

REFERENCE_COLUMNS = {0: ["C13", "C70", "GPT3.5", "GPT4"],
                     5: ["C13", "C70", "GPT3.5", "GPT4", "Med-PaLM 2"]}

# Published accuracies, by shot count -> row -> column.  None renders "-".
REFERENCE = {
    0: {
        "MMLU Anatomy":                {"C13": "50.4", "C70": "62.2", "GPT3.5": "56.3", "GPT4": "80.0"},
        "MMLU Clinical Knowledge":     {"C13": "54.0", "C70": "69.8", "GPT3.5": "69.8", "GPT4": "86.0"},
        "MMLU College Biology":        {"C13": "54.9", "C70": "79.2", "GPT3.5": "72.2", "GPT4": "95.1"},
        "MMLU College Medicine":       {"C13": "48.0", "C70": "67.0", "GPT3.5": "61.3", "GPT4": "76.9"},
        "MMLU Medical Genetics":       {"C13": "59.0", "C70": "69.0", "GPT3.5": "70.0", "GPT4": "91.0"},
        "MMLU Professional Medicine":  {"C13": "51.8", "C70": "71.3", "GPT3.5": "70.2", "GPT4": "93.0"},
        "MedMCQA":                     {"C13": "39.1", "C70": "47.0", "GPT3.5": "50.1", "GPT4": "69.5"},
        "MedQA (USMLE)":               {"C13": "34.4", "C70": "53.4", "GPT3.5": "50.8", "GPT4": "78.9"},
        "PubMedQA":                    {"C13": "72.9", "C70": "74.3", "GPT3.5": "71.6", "GPT4": "75.2"},
        "USMLE Sample Exam":           {"C13": "26.9", "C70": "54.3", "GPT3.5": "49.2", "GPT4": "83.2"},
    },
    5: {
        "MMLU Anatomy":                {"C13": "48.2", "C70": "65.2", "GPT3.5": "60.7", "GPT4": "80.0", "Med-PaLM 2": "77.8"},
        "MMLU Clinical Knowledge":     {"C13": "60.4", "C70": "72.8", "GPT3.5": "68.7", "GPT4": "86.4", "Med-PaLM 2": "88.3"},
        "MMLU College Biology":        {"C13": "59.0", "C70": "81.2", "GPT3.5": "72.9", "GPT4": "93.8", "Med-PaLM 2": "94.4"},
        "MMLU College Medicine":       {"C13": "52.6", "C70": "68.2", "GPT3.5": "63.6", "GPT4": "76.3", "Med-PaLM 2": "80.9"},
        "MMLU Medical Genetics":       {"C13": "59.0", "C70": "69.0", "GPT3.5": "68.0", "GPT4": "92.0", "Med-PaLM 2": "90.0"},
        "MMLU Professional Medicine":  {"C13": "53.3", "C70": "75.0", "GPT3.5": "69.8", "GPT4": "93.8", "Med-PaLM 2": "95.2"},
        "MedMCQA":                     {"C13": "44.8", "C70": "54.2", "GPT3.5": "51.0", "GPT4": "72.4", "Med-PaLM 2": "71.3"},
        "MedQA (USMLE)":               {"C13": "45.2", "C70": "60.7", "GPT3.5": "53.6", "GPT4": "81.4", "Med-PaLM 2": "79.7"},
        "PubMedQA":                    {"C13": "74.8", "C70": "77.9", "GPT3.5": "60.2", "GPT4": "74.4", "Med-PaLM 2": "79.2"},
        "USMLE Sample Exam":           {"C13": "39.5", "C70": "64.3", "GPT3.5": "58.5", "GPT4": "86.6", "Med-PaLM 2": None},
    },
}


def reference_cell(k: int, benchmark: str, column: str) -> str:
    """The published value as a string, or "-" when unpublished."""
    v = REFERENCE.get(k, {}).get(benchmark, {}).get(column)
    return "-" if v is None else v


def render_report(
    reports: list[EvalReport], reference: dict | None = None
) -> tuple[str, str]:
    """Returns (markdown, csv) with one table per shot count.

    Rows follow the published ordering; local reports slot into extra
    columns keyed by model id.  Shot counts other than 0/5 get a local-only
    table without reference columns.
    """
    ref = reference if reference is not None else REFERENCE
    for r in reports:
        r.validate()

    by_k: dict = {}
    for r in reports:
        by_k.setdefault(r.k, {}).setdefault(r.model_id, {})[r.benchmark] = r

    shot_counts = sorted(set(ref) | set(by_k))
    md = io.StringIO()
    csv_buf = io.StringIO()
    writer = csv.writer(csv_buf)
    writer.writerow(["shots", "dataset", "column", "value", "source"])

    for k in shot_counts:
        ref_cols = REFERENCE_COLUMNS.get(k, []) if ref is REFERENCE else sorted(
            {c for row in ref.get(k, {}).values() for c in row}
        )
        local_models = sorted(by_k.get(k, {}))
        local_cols = [f"{m} (local)" for m in local_models]
        rows = [b for b in BENCHMARK_ROWS if b in ref.get(k, {})]
        extra = sorted(
            {r.benchmark for m in by_k.get(k, {}) for r in by_k[k][m].values()}
            - set(rows)
        )
        rows += extra

        md.write(f"## {k}-shot\n\n")
        header = ["Dataset"] + ref_cols + local_cols
        md.write("| " + " | ".join(header) + " |\n")
        md.write("|" + "|".join(["---"] * len(header)) + "|\n")
        for b in rows:
            cells = [b]
            for c in ref_cols:
                v = ref.get(k, {}).get(b, {}).get(c)
                cell = "-" if v is None else str(v)
                cells.append(cell)
                writer.writerow([k, b, c, cell, "published"])
            for m in local_models:
                r = by_k[k][m].get(b)
                cell = r.pct() if r is not None else "-"
                cells.append(cell)
                writer.writerow([k, b, m, cell, "local"])
            md.write("| " + " | ".join(cells) + " |\n")
        md.write("\n")
    return md.getvalue(), csv_buf.getvalue()
