"""K-nearest-neighbors against a brute-force search oracle."""

import numpy as np

from emowear.models.neighbors import KNNRegressor


def _oracle_predict(X_train, y_train, queries, k):
    """Exhaustive neighbor search, ties broken by training row index."""
    out = np.empty(queries.shape[0])
    for i, q in enumerate(queries):
        dist = [(float(np.sum((x - q) ** 2)), idx) for idx, x in enumerate(X_train)]
        dist.sort()
        chosen = [y_train[idx] for _, idx in dist[:k]]
        out[i] = np.mean(chosen)
    return out


def test_matches_brute_force_on_random_queries():
    rng = np.random.default_rng(123)
    X = rng.normal(size=(500, 8))
    y = rng.normal(size=500)
    queries = rng.normal(size=(100, 8))
    knn = KNNRegressor(k=3).fit(X, y)
    assert np.array_equal(knn.predict(queries), _oracle_predict(X, y, queries, 3))


def test_query_on_training_point():
    # Exact hit plus two distant points: the answer averages all three
    # stored targets when k equals the training size.
    X = np.array([[0.0, 0.0], [100.0, 0.0], [0.0, 100.0]])
    y = np.array([1.0, 2.0, 3.0])
    knn = KNNRegressor(k=3).fit(X, y)
    assert knn.predict(np.array([[0.0, 0.0]]))[0] == np.mean(y)


def test_prediction_within_target_range():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(50, 4))
    y = rng.uniform(-2.0, 5.0, size=50)
    knn = KNNRegressor(k=3).fit(X, y)
    pred = knn.predict(rng.normal(size=(200, 4)))
    assert np.all(pred >= y.min()) and np.all(pred <= y.max())


def test_k_larger_than_train_set():
    X = np.array([[0.0], [1.0]])
    y = np.array([1.0, 3.0])
    knn = KNNRegressor(k=3).fit(X, y)
    assert knn.predict(np.array([[0.5]]))[0] == 2.0


def test_distance_tie_prefers_lower_index():
    X = np.array([[-1.0], [1.0], [5.0]])
    y = np.array([10.0, 20.0, 30.0])
    knn = KNNRegressor(k=1).fit(X, y)
    # Query at 0 is equidistant from rows 0 and 1; row 0 wins.
    assert knn.predict(np.array([[0.0]]))[0] == 10.0
