import numpy as np
import pytest
import scipy.sparse as sp

from litscreen.features import ClusterError, cluster_topics
from litscreen.features.base import FeatureMatrix


@pytest.fixture
def square_points():
    # two tight pairs: left column and right column of a wide rectangle
    return np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])


def test_square_fixture_matches_hand_kmeans(square_points):
    # hand k-means with c=2: centroids must converge to the two column means
    model, feats = cluster_topics(square_points, c=2, seed=0)
    got = sorted(model.centroids.tolist())
    assert np.allclose(got, [[0.0, 0.5], [10.0, 0.5]])
    # each point's distance row has smaller mass on its own cluster's column
    order = np.argsort(model.centroids[:, 0])
    rows = feats.values
    for i, point_cluster in enumerate([0, 0, 1, 1]):
        own_col = order[point_cluster]
        other_col = order[1 - point_cluster]
        assert rows[i, own_col] < rows[i, other_col]


def test_each_point_its_own_centroid_when_c_equals_n(square_points):
    model, feats = cluster_topics(square_points, c=4, seed=1)
    rows = feats.values
    assert rows.shape == (4, 4)
    for i in range(4):
        assert np.isclose(rows[i].min(), 0.0)


def test_rows_sum_to_one(square_points, rng):
    X = rng.normal(size=(30, 5))
    _, feats = cluster_topics(X, c=4, seed=2)
    assert np.allclose(feats.values.sum(axis=1), 1.0, atol=1e-6)
    assert feats.kind == "cluster_distance_dense"


def test_sparse_input_supported(rng):
    X = sp.random(40, 12, density=0.3, random_state=7, format="csr")
    model, feats = cluster_topics(X, c=3, seed=0)
    assert feats.values.shape == (40, 3)
    assert np.allclose(feats.values.sum(axis=1), 1.0)
    assert np.all(np.isfinite(model.centroids))


def test_feature_matrix_input(rng):
    X = rng.normal(size=(20, 4))
    wrapped = FeatureMatrix(values=X, kind="embedding_dense")
    model, feats = cluster_topics(wrapped, c=2, seed=5)
    assert feats.n == 20


def test_deterministic_given_seed(rng):
    X = rng.normal(size=(50, 6))
    m1, f1 = cluster_topics(X, c=5, seed=9)
    m2, f2 = cluster_topics(X, c=5, seed=9)
    assert np.array_equal(m1.centroids, m2.centroids)
    assert np.array_equal(f1.values, f2.values)


def test_cosine_distance_mode(rng):
    X = rng.normal(size=(30, 8))
    model, feats = cluster_topics(X, c=3, seed=1, distance="cosine")
    assert model.distance == "cosine"
    assert np.allclose(feats.values.sum(axis=1), 1.0)
    assert np.all(feats.values >= 0)


def test_errors(square_points):
    with pytest.raises(ClusterError):
        cluster_topics(square_points, c=5, seed=0)  # c > n
    with pytest.raises(ClusterError):
        cluster_topics(square_points, c=1, seed=0)
    identical = np.ones((6, 3))
    with pytest.raises(ClusterError, match="identical"):
        cluster_topics(identical, c=2, seed=0)
