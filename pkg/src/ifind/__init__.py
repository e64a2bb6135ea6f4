"""Personalized fuzzy text search for labeled item corpora."""

from .corpus import (
    Corpus,
    Item,
    Keyword,
    alphabet_stats,
    build_index,
    extract_keywords,
    load_corpus_jsonl,
    load_index,
    save_index,
    tokenize,
)
from .engine import (
    ConfigurationError,
    Engine,
    SearchOptions,
    SearchRequest,
    SearchResponse,
    StaleFeedbackError,
    merge,
)
from .interest import (
    FeedbackEvent,
    ModelParams,
    TrainingSample,
    UserProfile,
    WeightMatrix,
    evaluate,
    feedback_update,
    fit,
    kfold_evaluate,
    load_model,
    predict,
    save_model,
)
from .matching import (
    MatchHit,
    Query,
    RankedResult,
    baseline_fuzzy_search,
    bm_find,
    brute_force_search,
    candidates,
    dtw_distance,
    if_search,
    kmp_find,
    match_keyword,
)
from .snapshots import SnapshotError, SnapshotVersionError
from .wordspace import (
    Association,
    EmbeddingTable,
    LabelCodebook,
    VectorFormatError,
    build_codebook,
    directional_associate,
    distortion,
    load_embeddings,
    nearest_neighbors,
    quantize,
)

__version__ = "0.1.0"
