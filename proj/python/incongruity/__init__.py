"""Sentence-level sarcasm features from word-embedding similarity."""

from ._core import (
    EmbeddingTable,
    Error,
    Metrics,
    cosine_similarity,
    embed_features,
    extract_features,
    generate_synthetic,
    intersect_vocabularies,
    load_dataset,
    load_embeddings,
    run_config,
    tokenize,
    unweighted_features,
    weighted_features,
)

__all__ = [
    "EmbeddingTable",
    "Error",
    "Metrics",
    "cosine_similarity",
    "embed_features",
    "extract_features",
    "generate_synthetic",
    "intersect_vocabularies",
    "load_dataset",
    "load_embeddings",
    "run_config",
    "tokenize",
    "unweighted_features",
    "weighted_features",
]
