"""Dataset curation: heuristic page filters, visual dedup policy, and the
stratified sampler with its oversampled candidate quota.

Manual screening stays manual: this module emits review worklists (CSV)
rather than automating expert judgment.
"""
from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, EmptyPopulation
from .model import FigmaDocument, walk

CONTENT_CATEGORIES = (
    "User Identity & Personalization",
    "Marketing & Landing Content",
    "E-Commerce & Transactions",
    "Data & Information Presentation",
    "Forms & Interaction Flows",
    "Communication & Collaboration",
    "Support, Guidance & Onboarding",
    "Notifications & States",
    "Media & Entertainment",
    "Scheduling & Activities",
    "Health & Lifestyle",
    "Others",
)

PLATFORMS = ("MOBILE", "DESKTOP")
COMPLEXITIES = ("LOW", "MID", "HIGH", "HARD")

MAX_ASPECT_RATIO = 5.0
MIN_DIRECT_CHILDREN = 3
DOMINANT_IMAGE_FRACTION = 0.8


@dataclass(frozen=True)
class PageLabel:
    platform: str
    complexity: str
    quality: int
    content_category: str
    description: str = ""

    def __post_init__(self):
        if self.platform not in PLATFORMS:
            raise ValueError(f"platform must be one of {PLATFORMS}")
        if self.complexity not in COMPLEXITIES:
            raise ValueError(f"complexity must be one of {COMPLEXITIES}")
        if self.quality not in (1, 2, 3):
            raise ValueError("quality must be 1, 2, or 3")
        if self.content_category not in CONTENT_CATEGORIES:
            raise ValueError(f"unknown content category {self.content_category!r}")

    @property
    def stratum_key(self) -> tuple[str, str, int, str]:
        return (self.platform, self.complexity, self.quality, self.content_category)


@dataclass
class FilterVerdict:
    accepted: bool
    reasons: list[str] = field(default_factory=list)


@dataclass
class Stratum:
    key: tuple[str, str, int, str]
    members: list[str] = field(default_factory=list)


def heuristic_filter(doc: FigmaDocument) -> FilterVerdict:
    """Structural pre-filter. Rejects degenerate sizes, extreme aspect
    ratios (strictly above 5:1), near-blank canvases (< 3 direct children),
    and pages dominated (>= 80% of the area) by a single image node."""
    reasons: list[str] = []
    box = doc.root.bounding_box
    width = box.width if box else 0.0
    height = box.height if box else 0.0

    if width <= 0 or height <= 0:
        reasons.append("SIZE_INVALID")
    else:
        long_side, short_side = max(width, height), min(width, height)
        if long_side / short_side > MAX_ASPECT_RATIO:
            reasons.append("EXTREME_ASPECT")

    if len(doc.root.children) < MIN_DIRECT_CHILDREN:
        reasons.append("SPARSE_CONTENT")

    if width > 0 and height > 0:
        page_area = width * height
        for node, _, _ in walk(doc, "PRE"):
            if node.image_refs() and node.bounding_box is not None:
                if node.bounding_box.area >= DOMINANT_IMAGE_FRACTION * page_area:
                    reasons.append("DOMINANT_IMAGE")
                    break

    return FilterVerdict(accepted=not reasons, reasons=reasons)


def dedup_clusters(
    embeddings: dict[str, "np.ndarray | list[float]"],
    threshold: float = 0.95,
    sizes: dict[str, int] | None = None,
) -> set[str]:
    """Survivors of single-linkage clustering under cosine similarity.

    Pages whose pairwise cosine exceeds the threshold (strictly) join one
    cluster via transitive closure; each cluster keeps the member with the
    largest image byte size, ties going to the lexicographically smallest id.
    Vectors must be unit-normalized.
    """
    sizes = sizes or {}
    ids = sorted(embeddings)
    if not ids:
        return set()
    vectors = [np.asarray(embeddings[i], dtype=np.float64) for i in ids]
    dim = vectors[0].shape
    for i, v in zip(ids, vectors):
        if v.shape != dim or v.ndim != 1:
            raise DimensionMismatch(f"embedding for {i!r} has shape {v.shape}, expected {dim}")
    matrix = np.stack(vectors)
    sims = matrix @ matrix.T

    parent = list(range(len(ids)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            if sims[i, j] > threshold:
                union(i, j)

    clusters: dict[int, list[str]] = {}
    for idx, sample_id in enumerate(ids):
        clusters.setdefault(find(idx), []).append(sample_id)

    survivors = set()
    for members in clusters.values():
        members.sort(key=lambda sid: (-sizes.get(sid, 0), sid))
        survivors.add(members[0])
    return survivors


def redundant_quota(n_target: int, n_remain: int) -> int:
    """Oversampled candidate-set size for one stratum."""
    if n_target < 0 or n_remain < 0:
        raise ValueError("counts must be non-negative")
    if n_target < 3:
        return min(n_remain, 6)
    if n_target <= 5:
        return min(n_remain, 3 * n_target)
    return min(n_remain, 2 * n_target)


def _largest_remainder(shares: list[float], total: int) -> list[int]:
    floors = [int(s) for s in shares]
    remainder = total - sum(floors)
    order = sorted(range(len(shares)), key=lambda i: (-(shares[i] - floors[i]), i))
    targets = list(floors)
    for i in order[:remainder]:
        targets[i] += 1
    return targets


def stratified_sample(
    labels: dict[str, PageLabel],
    total: int,
    seed: int,
) -> dict[tuple[str, str, int, str], list[str]]:
    """Per-stratum candidate lists for the expert review phase.

    Strata partition the quality>=2 population by (platform, complexity,
    quality, content category). Targets follow largest-remainder rounding of
    the proportional shares and sum exactly to the request; each stratum's
    candidate list is an oversampled uniform draw of redundant_quota(target,
    remaining) members, deterministic under the seed.
    """
    eligible = {sid: lab for sid, lab in labels.items() if lab.quality in (2, 3)}
    if not eligible:
        raise EmptyPopulation("no quality-2/3 samples to draw from")
    if total > len(eligible):
        raise ValueError(f"requested {total} samples from {len(eligible)} eligible")

    strata: dict[tuple, Stratum] = {}
    for sid in sorted(eligible):
        key = eligible[sid].stratum_key
        strata.setdefault(key, Stratum(key=key)).members.append(sid)

    keys = sorted(strata)
    population = len(eligible)
    shares = [total * len(strata[k].members) / population for k in keys]
    targets = _largest_remainder(shares, total)

    out: dict[tuple, list[str]] = {}
    for key, target in zip(keys, targets):
        members = strata[key].members
        quota = redundant_quota(target, len(members))
        rng = random.Random(f"{seed}:{key}")
        out[key] = sorted(rng.sample(members, quota))
    return out


# ---------------------------------------------------------------------------
# CSV interchange

LABEL_FIELDS = ("id", "platform", "complexity", "quality", "category", "description")


def read_labels_csv(path: str | Path) -> dict[str, PageLabel]:
    labels: dict[str, PageLabel] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            labels[row["id"]] = PageLabel(
                platform=row["platform"].strip().upper(),
                complexity=row["complexity"].strip().upper(),
                quality=int(row["quality"]),
                content_category=row["category"].strip(),
                description=row.get("description", ""),
            )
    return labels


def write_worklist_csv(path: str | Path, candidates: dict[tuple, list[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["platform", "complexity", "quality", "category", "candidate_id"])
        for key in sorted(candidates):
            platform, complexity, quality, category = key
            for sid in candidates[key]:
                writer.writerow([platform, complexity, quality, category, sid])
