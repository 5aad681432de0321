from .benchmarks import BenchmarkItem, load_benchmark
from .shots import ShotSet, build_kshot
from .scoring import EvalConfig, evaluate, format_mc_prompt, select_answer
from .report import EvalReport, render_report

__all__ = [
    "BenchmarkItem",
    "EvalConfig",
    "EvalReport",
    "ShotSet",
    "build_kshot",
    "evaluate",
    "format_mc_prompt",
    "load_benchmark",
    "render_report",
    "select_answer",
]
