import numpy as np
import pytest

from penrec.vq import Codebook, quantize, quantize_batch, train_codebook


def brute_force_2means(points):
    """Optimal 2-means over all 2-partitions."""
    best = None
    n = len(points)
    for mask in range(1, 2 ** n - 1):
        a = np.array([points[i] for i in range(n) if mask & (1 << i)])
        b = np.array([points[i] for i in range(n) if not mask & (1 << i)])
        ca, cb = a.mean(axis=0), b.mean(axis=0)
        cost = ((a - ca) ** 2).sum() + ((b - cb) ** 2).sum()
        if best is None or cost < best[0]:
            best = (cost, {tuple(ca), tuple(cb)})
    return best[1]


def test_four_point_optimal_2means():
    points = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 10.0], [10.0, 11.0]])
    expected = brute_force_2means(points)
    book = train_codebook(points, size=2, seed=0)
    got = {tuple(np.round(c, 9)) for c in book.centroids}
    assert got == {tuple(np.round(np.array(c), 9)) for c in expected}
    assert got == {(0.0, 0.5), (10.0, 10.5)}


def test_size_one_is_global_mean():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(40, 3))
    book = train_codebook(pts, size=1, seed=0)
    np.testing.assert_allclose(book.centroids[0], pts.mean(axis=0), atol=1e-12)


def test_distortion_history_non_increasing():
    rng = np.random.default_rng(2)
    for seed in range(5):
        pts = np.random.default_rng(seed).normal(size=(300, 4)) * 10
        book = train_codebook(pts, size=16, seed=seed)
        hist = book.distortion_history
        assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))


def test_insufficient_distinct_vectors():
    pts = np.tile(np.array([[1.0, 2.0]]), (50, 1))
    with pytest.raises(ValueError, match="distinct"):
        train_codebook(pts, size=4, seed=0)


def test_quantize_identity_on_centroids():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(200, 5))
    book = train_codebook(pts, size=8, seed=0)
    for i, c in enumerate(book.centroids):
        assert quantize(book, c) == i


def test_quantize_trivial_cases():
    book = Codebook(centroids=np.array([[0.0, 0.0], [10.0, 10.0]]))
    assert quantize(book, np.array([1.0, 1.0])) == 0
    assert quantize(book, np.array([9.0, 9.0])) == 1


def test_quantize_tie_lowest_index():
    book = Codebook(centroids=np.array([[0.0], [2.0]]))
    assert quantize(book, np.array([1.0])) == 0


def test_quantize_dimension_mismatch():
    book = Codebook(centroids=np.zeros((4, 3)))
    with pytest.raises(ValueError):
        quantize(book, np.zeros(2))


def test_quantize_agrees_with_exhaustive_scan():
    rng = np.random.default_rng(4)
    pts = rng.normal(size=(500, 6)) * 5
    book = train_codebook(pts, size=32, seed=0)
    queries = rng.normal(size=(1000, 6)) * 5
    batch = quantize_batch(book, queries)
    for q, got in zip(queries, batch):
        d2 = ((book.centroids - q) ** 2).sum(axis=1)
        best = min(range(len(d2)), key=lambda k: (d2[k], k))
        assert got == best
        assert quantize(book, q) == best


def test_training_deterministic():
    pts = np.random.default_rng(5).normal(size=(400, 3))
    a = train_codebook(pts, size=16, seed=9)
    b = train_codebook(pts, size=16, seed=9)
    np.testing.assert_array_equal(a.centroids, b.centroids)
    assert a.distortion_history == b.distortion_history


def test_non_power_of_two_size():
    pts = np.random.default_rng(6).normal(size=(300, 2)) * 4
    book = train_codebook(pts, size=12, seed=0)
    assert book.size == 12
    hist = book.distortion_history
    assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))
