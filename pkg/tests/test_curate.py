"""Curation contracts: filters, dedup clustering, quota, stratified sampling."""
from __future__ import annotations

import json
import math
import random

import numpy as np
import pytest

from figforge.curate import (
    CONTENT_CATEGORIES,
    PageLabel,
    dedup_clusters,
    heuristic_filter,
    read_labels_csv,
    redundant_quota,
    stratified_sample,
    write_worklist_csv,
)
from figforge.errors import DimensionMismatch, EmptyPopulation
from figforge.model import parse_document

from conftest import doc, frame, image_fill, node, solid


def parse(raw: dict):
    return parse_document(json.dumps(raw))


def page(w, h, n_children=4, image_box=None):
    children = [node("RECTANGLE", box=(i * 10, 10, 8, 8), fills=[solid(0, 0, 0)])
                for i in range(n_children)]
    if image_box is not None:
        children.append(node("RECTANGLE", box=image_box, fills=[image_fill("ref-x")]))
    return parse(doc(frame(*children, box=(0, 0, w, h))))


# -- heuristic_filter ---------------------------------------------------------

def test_rejects_non_positive_size():
    verdict = heuristic_filter(page(0, 600))
    assert not verdict.accepted
    assert "SIZE_INVALID" in verdict.reasons


def test_extreme_aspect_is_strictly_above_five():
    # the boundary 5:1 page passes; anything beyond it fails
    assert heuristic_filter(page(1200, 6000)).accepted
    verdict = heuristic_filter(page(1200, 6001))
    assert verdict.reasons == ["EXTREME_ASPECT"]


def test_sparse_content_under_three_children():
    verdict = heuristic_filter(page(1000, 1000, n_children=2))
    assert verdict.reasons == ["SPARSE_CONTENT"]


def test_dominant_image_at_eighty_percent():
    accepted = heuristic_filter(page(1000, 1000, image_box=(0, 0, 790, 1000)))
    assert accepted.accepted  # 79% < 80%
    rejected = heuristic_filter(page(1000, 1000, image_box=(0, 0, 800, 1000)))
    assert rejected.reasons == ["DOMINANT_IMAGE"]


def test_accepted_means_no_reasons():
    verdict = heuristic_filter(page(1200, 800))
    assert verdict.accepted and verdict.reasons == []


def test_adding_children_never_flips_sparse_to_reject():
    for n in range(0, 8):
        before = "SPARSE_CONTENT" in heuristic_filter(page(1000, 1000, n_children=n)).reasons
        after = "SPARSE_CONTENT" in heuristic_filter(page(1000, 1000, n_children=n + 1)).reasons
        assert not (not before and after)


# -- dedup_clusters ------------------------------------------------------------

def unit(v):
    arr = np.asarray(v, dtype=np.float64)
    return arr / np.linalg.norm(arr)


def test_pair_above_threshold_keeps_larger_file():
    a = unit([1.0, 0.0, 0.1])
    b = unit([1.0, 0.02, 0.1])
    assert float(a @ b) > 0.95
    survivors = dedup_clusters({"A": a, "B": b}, sizes={"A": 2000, "B": 100})
    assert survivors == {"A"}


def test_all_below_threshold_all_survive():
    vecs = {"A": unit([1, 0, 0]), "B": unit([0, 1, 0]), "C": unit([0, 0, 1])}
    assert dedup_clusters(vecs, sizes={}) == {"A", "B", "C"}


def test_transitive_chain_collapses_to_one():
    # A~B and B~C exceed the threshold while A·C is far below it
    theta = math.acos(0.96)
    a = np.array([1.0, 0.0])
    b = np.array([math.cos(theta), math.sin(theta)])
    c = np.array([math.cos(2 * theta), math.sin(2 * theta)])
    assert float(a @ c) < 0.95
    survivors = dedup_clusters({"A": a, "B": b, "C": c}, sizes={"B": 10})
    assert survivors == {"B"}


def test_threshold_is_strict():
    theta = math.acos(0.95)
    a = np.array([1.0, 0.0])
    b = np.array([math.cos(theta), math.sin(theta)])
    assert float(a @ b) == pytest.approx(0.95)
    assert dedup_clusters({"A": a, "B": b}) == {"A", "B"}


def test_tie_on_size_goes_to_smallest_id():
    a = unit([1.0, 0.0])
    survivors = dedup_clusters({"B": a, "A": a.copy()}, sizes={"A": 5, "B": 5})
    assert survivors == {"A"}


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        dedup_clusters({"A": np.ones(3), "B": np.ones(4)})


def brute_force_survivors(embeddings, threshold, sizes):
    ids = sorted(embeddings)
    clusters = [{i} for i in ids]
    changed = True
    while changed:
        changed = False
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                linked = any(
                    float(np.dot(embeddings[x], embeddings[y])) > threshold
                    for x in clusters[i] for y in clusters[j]
                )
                if linked:
                    clusters[i] |= clusters[j]
                    del clusters[j]
                    changed = True
                    break
            if changed:
                break
    out = set()
    for cluster in clusters:
        out.add(min(cluster, key=lambda sid: (-sizes.get(sid, 0), sid)))
    return out


def test_dedup_matches_brute_force_on_random_sets():
    rng = np.random.default_rng(5)
    pyrng = random.Random(5)
    for trial in range(20):
        n = pyrng.randint(2, 50)
        base = rng.normal(size=(max(2, n // 4), 16))
        vectors = {}
        sizes = {}
        for i in range(n):
            center = base[pyrng.randrange(len(base))]
            noisy = center + rng.normal(scale=pyrng.choice([0.001, 0.05, 1.0]), size=16)
            vectors[f"p{i:02d}"] = noisy / np.linalg.norm(noisy)
            sizes[f"p{i:02d}"] = pyrng.randint(0, 10_000)
        expected = brute_force_survivors(vectors, 0.95, sizes)
        assert dedup_clusters(vectors, 0.95, sizes) == expected, f"trial {trial}"


# -- redundant_quota -------------------------------------------------------------

def test_quota_examples():
    assert redundant_quota(2, 10) == 6
    assert redundant_quota(4, 100) == 12
    assert redundant_quota(8, 5) == 5


def quota_reference(n_target, n_remain):
    if n_target < 3:
        return min(n_remain, 6)
    if n_target <= 5:
        return min(n_remain, 3 * n_target)
    return min(n_remain, 2 * n_target)


def test_quota_exhaustive_grid():
    for n_target in range(21):
        for n_remain in range(21):
            assert redundant_quota(n_target, n_remain) == quota_reference(n_target, n_remain)


# -- stratified_sample -------------------------------------------------------------

def make_labels(spec: dict[tuple, int]) -> dict[str, PageLabel]:
    labels = {}
    i = 0
    for (platform, complexity, quality, category), count in spec.items():
        for _ in range(count):
            labels[f"s{i:03d}"] = PageLabel(platform, complexity, quality, category)
            i += 1
    return labels


CAT = CONTENT_CATEGORIES[0]
CAT2 = CONTENT_CATEGORIES[1]


def test_two_equal_strata_split_evenly():
    labels = make_labels({
        ("MOBILE", "LOW", 2, CAT): 10,
        ("DESKTOP", "LOW", 2, CAT): 10,
    })
    out = stratified_sample(labels, total=4, seed=1)
    quotas = {k: len(v) for k, v in out.items()}
    # target 2 each -> quota min(10, 6) = 6 candidates per stratum
    assert quotas == {("MOBILE", "LOW", 2, CAT): 6, ("DESKTOP", "LOW", 2, CAT): 6}


def test_largest_remainder_30_10_total_8():
    labels = make_labels({
        ("MOBILE", "LOW", 2, CAT): 30,
        ("DESKTOP", "LOW", 2, CAT): 10,
    })
    out = stratified_sample(labels, total=8, seed=3)
    # targets (6, 2): candidate quotas 2*6=12 and min(10, 6)=6
    assert len(out[("MOBILE", "LOW", 2, CAT)]) == 12
    assert len(out[("DESKTOP", "LOW", 2, CAT)]) == 6


def test_quality_one_excluded():
    labels = make_labels({
        ("MOBILE", "LOW", 1, CAT): 50,
        ("MOBILE", "LOW", 2, CAT): 10,
    })
    out = stratified_sample(labels, total=5, seed=1)
    assert set(out) == {("MOBILE", "LOW", 2, CAT)}


def test_same_seed_reproduces_candidates():
    labels = make_labels({
        ("MOBILE", "MID", 2, CAT): 40,
        ("DESKTOP", "HIGH", 3, CAT2): 25,
        ("MOBILE", "LOW", 3, CAT): 12,
    })
    assert stratified_sample(labels, 10, seed=7) == stratified_sample(labels, 10, seed=7)
    assert stratified_sample(labels, 10, seed=7) != stratified_sample(labels, 10, seed=8)


def test_targets_sum_and_deviation_bound():
    rng = random.Random(2)
    for _ in range(10):
        spec = {}
        for platform in ("MOBILE", "DESKTOP"):
            for quality in (2, 3):
                for category in CONTENT_CATEGORIES[:4]:
                    if rng.random() < 0.7:
                        spec[(platform, "MID", quality, category)] = rng.randint(1, 40)
        labels = make_labels(spec)
        total = rng.randint(1, max(1, len(labels) // 2))
        out = stratified_sample(labels, total, seed=11)
        population = len(labels)
        targets = {}
        for key, members in out.items():
            stratum_size = sum(1 for lab in labels.values() if lab.stratum_key == key)
            share = total * stratum_size / population
            # recover the target from the quota function is ambiguous; recompute shares
            targets[key] = share
        # sum of rounded targets equals the request: recompute via the module helper
        from figforge.curate import _largest_remainder

        keys = sorted(targets)
        rounded = _largest_remainder([targets[k] for k in keys], total)
        assert sum(rounded) == total
        for share, target in zip([targets[k] for k in keys], rounded):
            assert abs(target - share) < 1.0


def test_empty_population_raises():
    labels = make_labels({("MOBILE", "LOW", 1, CAT): 4})
    with pytest.raises(EmptyPopulation):
        stratified_sample(labels, 1, seed=0)


# -- CSV interchange -------------------------------------------------------------

def test_labels_csv_round_trip(tmp_path):
    csv_path = tmp_path / "labels.csv"
    csv_path.write_text(
        "id,platform,complexity,quality,category,description\n"
        f"a1,mobile,low,2,{CAT},login page\n"
        f"a2,desktop,high,3,{CAT2},dashboard\n",
        encoding="utf-8",
    )
    labels = read_labels_csv(csv_path)
    assert labels["a1"].platform == "MOBILE"
    assert labels["a2"].quality == 3

    out = stratified_sample(labels, 1, seed=1)
    worklist = tmp_path / "worklist.csv"
    write_worklist_csv(worklist, out)
    content = worklist.read_text(encoding="utf-8")
    assert content.startswith("platform,complexity,quality,category,candidate_id")
    assert "a1" in content or "a2" in content
