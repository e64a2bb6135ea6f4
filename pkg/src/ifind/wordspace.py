"""Word vectors, nearest-neighbor association, and label-codebook quantization.

Open-domain association finds a word's nearest neighbors anywhere in the
vector space.  Directional association constrains the result to the domain:
neighbors are mapped through a codebook built from the corpus labels, where
each label owns the region of space closest to its vector (the
nearest-neighbor condition), so every association lands on a searchable
label.  Corpora here are small, so scans are exact; no approximate index.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


class VectorFormatError(ValueError):
    """A vector file violates the plain-text embedding format."""


class EmbeddingTable:
    """word -> vector map with a fixed dimension; immutable after load."""

    def __init__(self, dim: int, entries: dict[str, np.ndarray]):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        if not entries:
            raise ValueError("embedding table must contain at least one word")
        self.dim = dim
        self.entries: dict[str, np.ndarray] = {}
        for word, vec in entries.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (dim,):
                raise ValueError(f"vector for {word!r} has shape {arr.shape}, want ({dim},)")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"vector for {word!r} has non-finite components")
            self.entries[word] = arr

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def vector(self, word: str) -> np.ndarray:
        return self.entries[word]


@dataclass(frozen=True)
class LabelCodebook:
    """Ordered target label vectors; quantization cells partition the space
    by nearest label, ties going to the lowest index."""

    labels: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        if not self.labels:
            raise ValueError("codebook must contain at least one label")

    @property
    def words(self) -> list[str]:
        return [w for w, _ in self.labels]

    @property
    def dim(self) -> int:
        return self.labels[0][1].shape[0]


@dataclass(frozen=True)
class Association:
    """Ranked neighbors of a source word; distances non-decreasing."""

    word: str
    neighbors: tuple[tuple[str, float], ...]


def load_embeddings(path: str) -> EmbeddingTable:
    """Read the plain-text vector format: a "<count> <dim>" header line,
    then one word and dim decimal components per line.

    Duplicate words keep the last occurrence; the replacements are counted
    and logged as a warning.
    """
    entries: dict[str, np.ndarray] = {}
    duplicates = 0
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header.strip():
            raise VectorFormatError(f"{path}: empty vector file")
        parts = header.split()
        if len(parts) != 2:
            raise VectorFormatError(f"{path}:1: header must be '<count> <dim>'")
        try:
            declared, dim = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise VectorFormatError(f"{path}:1: non-numeric header: {exc}") from exc
        if dim < 1:
            raise VectorFormatError(f"{path}:1: dimension must be >= 1, got {dim}")
        for lineno, line in enumerate(fh, 2):
            if not line.strip():
                continue
            cols = line.split()
            if len(cols) != dim + 1:
                raise VectorFormatError(
                    f"{path}:{lineno}: expected {dim} components, got {len(cols) - 1}"
                )
            word = cols[0]
            try:
                vec = np.array([float(c) for c in cols[1:]], dtype=np.float64)
            except ValueError as exc:
                raise VectorFormatError(f"{path}:{lineno}: non-numeric component: {exc}") from exc
            if word in entries:
                duplicates += 1
            entries[word] = vec
    if not entries:
        raise VectorFormatError(f"{path}: vector file declares a header but no vectors")
    if duplicates:
        logger.warning("%s: %d duplicate words replaced (last occurrence wins)", path, duplicates)
    if declared != len(entries):
        logger.debug("%s: header declares %d words, found %d", path, declared, len(entries))
    return EmbeddingTable(dim, entries)


def write_embeddings(path: str, table: EmbeddingTable) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(table.entries)} {table.dim}\n")
        for word, vec in table.entries.items():
            fh.write(word + " " + " ".join(repr(float(c)) for c in vec) + "\n")


def _distance(a: np.ndarray, b: np.ndarray, metric: str) -> float:
    if metric == "euclidean":
        return float(np.linalg.norm(a - b))
    if metric == "cosine":
        denom = float(np.linalg.norm(a) * np.linalg.norm(b))
        if denom == 0.0:
            return 1.0
        return 1.0 - float(np.dot(a, b)) / denom
    raise ValueError(f"unknown metric {metric!r}")


def nearest_neighbors(
    word: str, table: EmbeddingTable, n: int, metric: str = "euclidean"
) -> Association | None:
    """The n nearest other words; ties break lexicographically.
    Returns None for a word the table does not contain."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if word not in table:
        return None
    target = table.vector(word)
    scored = sorted(
        ((_distance(vec, target, metric), other) for other, vec in table.entries.items() if other != word),
    )
    return Association(word, tuple((w, d) for d, w in scored[:n]))


def quantize(vector, codebook: LabelCodebook) -> tuple[str, float]:
    """Map a vector to its nearest codebook label.

    Returns (label word, squared Euclidean distance); ties go to the lowest
    codebook index, so every vector lands in exactly one cell.
    """
    vec = np.asarray(vector, dtype=np.float64)
    if vec.shape != (codebook.dim,):
        raise ValueError(f"vector has shape {vec.shape}, codebook dimension is {codebook.dim}")
    best_label = None
    best_d = np.inf
    for label, center in codebook.labels:
        d = float(np.sum((vec - center) ** 2))
        if d < best_d:
            best_label, best_d = label, d
    return best_label, best_d


def distortion(table: EmbeddingTable, codebook: LabelCodebook) -> float:
    """Mean squared distance from every table word to its assigned label."""
    total = 0.0
    for vec in table.entries.values():
        _, d = quantize(vec, codebook)
        total += d
    return total / len(table.entries)


def build_codebook(
    table: EmbeddingTable, label_words, dedupe: bool = True
) -> tuple[LabelCodebook, list[str]]:
    """Build the target codebook from corpus labels present in the table.
    Absent labels are returned for reporting, not an error."""
    present: list[tuple[str, np.ndarray]] = []
    seen: set[str] = set()
    missing: list[str] = []
    for word in label_words:
        if dedupe and word in seen:
            continue
        seen.add(word)
        if word in table:
            present.append((word, table.vector(word)))
        else:
            missing.append(word)
    if not present:
        raise ValueError("no label word is present in the embedding table")
    return LabelCodebook(tuple(present)), missing


def directional_associate(
    word: str,
    table: EmbeddingTable,
    codebook: LabelCodebook,
    n: int,
    metric: str = "euclidean",
) -> list[str]:
    """Associate a word with up to n domain labels.

    Over-fetches 3n open-domain neighbors, maps each through the codebook,
    keeps each label's best neighbor distance, and ranks labels by that
    distance.  A word that is itself a codebook label always ranks first.
    An unknown word yields no expansion.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    assoc = nearest_neighbors(word, table, 3 * n, metric=metric)
    if assoc is None:
        return []
    best: dict[str, float] = {}
    for neighbor, dist in assoc.neighbors:
        label, _ = quantize(table.vector(neighbor), codebook)
        if label not in best or dist < best[label]:
            best[label] = dist
    ranked: list[str] = []
    if word in set(codebook.words):
        ranked.append(word)
        best.pop(word, None)
    ranked.extend(sorted(best, key=lambda lb: (best[lb], lb)))
    return ranked[:n]
