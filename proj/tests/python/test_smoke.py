import numpy as np
import pytest

import relsim


def four_vertex_adjacency():
    # clinicians c1, c2; patients p1, p2; w(c1,p1)=2, w(c1,p2)=1, w(c2,p2)=1
    a = np.zeros((4, 4))
    for i, j, w in [(0, 2, 2), (0, 3, 1), (1, 3, 1)]:
        a[i, j] = a[j, i] = w
    return a


def random_bipartite(rng, m, n, density=0.3):
    b = (rng.random((m, n)) < density) * rng.integers(1, 6, size=(m, n))
    b[np.arange(m), rng.integers(0, n, size=m)] = 1
    b[rng.integers(0, m, size=n), np.arange(n)] = 1
    a = np.zeros((m + n, m + n))
    a[:m, m:] = b
    a[m:, :m] = b.T
    return a


def test_laplacian_entries():
    lap = relsim.normalized_laplacian(four_vertex_adjacency())
    assert lap[0, 2] == pytest.approx(2 / np.sqrt(6))
    assert lap[0, 3] == pytest.approx(1 / np.sqrt(6))
    assert lap[1, 3] == pytest.approx(1 / np.sqrt(2))
    np.testing.assert_array_equal(lap, lap.T)


def test_eigenpairs_match_numpy():
    rng = np.random.default_rng(3)
    a = random_bipartite(rng, 12, 40)
    lap = relsim.normalized_laplacian(a)
    values, vectors = relsim.top_k_eigenpairs(lap, 5, tol=1e-10)
    ref = np.sort(np.linalg.eigvalsh(lap))[::-1][:5]
    np.testing.assert_allclose(values, ref, atol=1e-9)
    np.testing.assert_allclose(lap @ vectors, vectors * np.asarray(values), atol=1e-9)
    dense_values, _ = relsim.dense_eigen(lap)
    np.testing.assert_allclose(dense_values, np.sort(np.linalg.eigvalsh(lap))[::-1], atol=1e-12)


def test_similarity_features_shape_and_norms():
    patients = [f"p{j}" for j in range(30)]
    rng = np.random.default_rng(0)
    graphs = []
    for tag, m in (("diag", 8), ("followup", 5)):
        edges = {(int(rng.integers(m)), j): int(rng.integers(1, 4)) for j in range(30)}
        edges.update({(i, int(rng.integers(30))): 1 for i in range(m)})
        graphs.append((tag, [f"{tag}{i}" for i in range(m)], [(c, p, w) for (c, p), w in edges.items()]))
    x = relsim.extract_similarity_features(patients, graphs, k=5)
    assert x.shape == (30, 10)
    for block in (x[:, :5], x[:, 5:]):
        norms = np.linalg.norm(block, axis=1)
        assert np.all((np.abs(norms - 1) < 1e-12) | (norms == 0))


def test_metrics():
    assert relsim.pr_auc([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0]) == pytest.approx(5 / 6)
    assert relsim.precision_at_k([0.9, 0.8, 0.8], [0, 1, 0], ["c", "b", "a"], 2) == (0, 0.0)
    assert relsim.format_improvement(relsim.improvement_percent(346, 370)) == "+6.9%"
    assert relsim.format_improvement(relsim.improvement_percent(0, 3)) == "n/a"
    with pytest.raises(relsim.UndefinedMetricError):
        relsim.pr_auc([0.1, 0.2], [1, 1])
    assert issubclass(relsim.UndefinedMetricError, relsim.DataError)


def test_config_and_errors():
    cfg = relsim.default_config()
    assert cfg["k"] == "5"
    assert cfg["graphs"] == "diag,followup"
    with pytest.raises(relsim.UsageError):
        relsim.run_experiment({"no_such_key": "1"})


def test_small_experiment():
    res = relsim.run_experiment({
        "n_patients": "1200", "n_diag_clinicians": "40", "n_followup_clinicians": "15",
        "metric_ks": "10,50", "epochs": "100",
    })
    assert res["n_holdout_rows"] > 0
    assert 0 < res["baseline"]["pr_auc"] <= 1
    assert set(res["proposed"]["hits"]) == {10, 50}
    assert "Improvement" in res["table"]
