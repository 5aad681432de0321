from .templates import PromptTemplate, builtin_template, load_template
from .parsing import ParseError, parse_dialogue, render_dialogue_lines
from .validation import ValidationPolicy, validate_dialogue
from .pipeline import (
    DatasetManifest,
    GenerationParams,
    TransformResult,
    run_pipeline,
    transform_document,
)

__all__ = [
    "DatasetManifest",
    "GenerationParams",
    "ParseError",
    "PromptTemplate",
    "TransformResult",
    "ValidationPolicy",
    "builtin_template",
    "load_template",
    "parse_dialogue",
    "render_dialogue_lines",
    "run_pipeline",
    "transform_document",
    "validate_dialogue",
]
