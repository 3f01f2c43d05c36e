"""Encoders, losses, training loop, and the alpha/beta grid search."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvge.graph import Graph, ValidationError, normalized_adjacency
from mvge.model import (
    MVGEConfig,
    MVGEModel,
    TrainingDivergedError,
    adjacency_loss,
    embedding_dim_std,
    grid_search_alpha_beta,
    kl_feature_loss,
    merge_embeddings,
    total_loss,
    train,
)
from mvge.numerics import grad_check, softmax_rows
from mvge.synth import SynthSpec, generate_synthetic
from mvge.walks import ViewPair, build_views

from conftest import feature_matrices, make_dataset, random_dataset


def toy_cfg(**kw):
    base = dict(dim_ego=6, dim_agg=6, hidden_dim=8, epochs=2, seed=0)
    base.update(kw)
    return MVGEConfig(**base)


def toy_model(n=5, f_ego=4, f_agg=4, **kw):
    cfg = toy_cfg(**kw)
    return MVGEModel(cfg, f_ego=f_ego, f_agg=f_agg), cfg


# -- encoders ----------------------------------------------------------------

def test_zero_input_zero_output():
    model, _ = toy_model()
    h, _ = model.encode_ego(np.zeros((5, 4)))
    # biases start at zero, so the linear path maps 0 to 0
    assert np.allclose(h, 0.0)


def test_ego_output_width():
    model, cfg = toy_model()
    h, _ = model.encode_ego(np.random.default_rng(0).normal(size=(5, 4)))
    assert h.shape == (5, cfg.dim_ego)


def test_agg_output_width(triangle):
    model, cfg = toy_model(n=3)
    s = normalized_adjacency(triangle)
    h, _ = model.encode_agg(np.random.default_rng(0).normal(size=(3, 4)), s)
    assert h.shape == (3, cfg.dim_agg)


def test_ego_feature_width_checked():
    model, _ = toy_model(f_ego=4)
    with pytest.raises(ValidationError, match="ego features"):
        model.encode_ego(np.zeros((5, 7)))


def test_ego_row_permutation_equivariance():
    model, _ = toy_model()
    x = np.random.default_rng(1).normal(size=(5, 4))
    perm = np.array([3, 0, 4, 1, 2])
    h, _ = model.encode_ego(x)
    h_p, _ = model.encode_ego(x[perm])
    assert np.allclose(h_p, h[perm], atol=1e-9)


def test_agg_permutation_equivariance_with_permuted_operator():
    # permute features and the adjacency together; embeddings must follow
    g, _ = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    perm = np.array([2, 4, 0, 1, 3])
    inv = np.argsort(perm)
    g_p, _ = Graph.from_edges(5, [(inv[u], inv[v]) for u, v in g.edge_array()])
    model, _ = toy_model(n=5)
    x = np.random.default_rng(2).normal(size=(5, 4))
    h, _ = model.encode_agg(x, normalized_adjacency(g))
    h_p, _ = model.encode_agg(x[perm], normalized_adjacency(g_p))
    assert np.allclose(h_p, h[perm], atol=1e-9)


def test_isolated_node_gcn_is_scaled_mlp():
    # with no edges S == I, so each row passes through the GCN alone
    g, _ = Graph.from_edges(3, [])
    s = normalized_adjacency(g)
    model, _ = toy_model(n=3)
    x = np.random.default_rng(3).normal(size=(3, 4))
    h_all, _ = model.encode_agg(x, s)
    g1, _ = Graph.from_edges(1, [])
    s1 = normalized_adjacency(g1)
    h_one, _ = model.encode_agg(x[1:2], s1)
    assert np.allclose(h_one, h_all[1:2])


def test_constant_rows_on_regular_graph_stay_constant(triangle):
    s = normalized_adjacency(triangle)
    model, _ = toy_model(n=3)
    x = np.tile(np.array([1.0, -2.0, 0.5, 3.0]), (3, 1))
    h, _ = model.encode_agg(x, s)
    assert np.allclose(h, h[0])


def test_gcn_ego_encoder_variant(triangle):
    model, cfg = toy_model(n=3, ego_encoder="gcn")
    s = normalized_adjacency(triangle)
    x = np.random.default_rng(4).normal(size=(3, 4))
    h, _ = model.encode_ego(x, s)
    assert h.shape == (3, cfg.dim_ego)
    with pytest.raises(ValidationError, match="adjacency"):
        model.encode_ego(x)


def test_same_seed_same_init():
    a, _ = toy_model(seed=5)
    b, _ = toy_model(seed=5)
    for k in a.params:
        assert np.array_equal(a.params[k].value, b.params[k].value)


# -- merge -------------------------------------------------------------------

def test_merge_concat_widths():
    h = merge_embeddings(np.ones((4, 64)), np.zeros((4, 64)), "concat")
    assert h.shape == (4, 128)
    assert np.all(h[:, :64] == 1.0) and np.all(h[:, 64:] == 0.0)


def test_merge_sum_cancels():
    x = np.random.default_rng(0).normal(size=(3, 5))
    assert np.allclose(merge_embeddings(x, -x, "sum"), 0.0)


def test_merge_mean_is_half_sum():
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=(3, 5)), rng.normal(size=(3, 5))
    assert np.allclose(
        merge_embeddings(a, b, "mean"), merge_embeddings(a, b, "sum") / 2.0
    )


def test_merge_dim_mismatch_rejected():
    with pytest.raises(ValidationError):
        merge_embeddings(np.ones((3, 4)), np.ones((3, 5)), "sum")
    with pytest.raises(ValidationError):
        merge_embeddings(np.ones((3, 4)), np.ones((2, 4)), "concat")
    with pytest.raises(ValidationError):
        merge_embeddings(np.ones((3, 4)), np.ones((3, 4)), "outer")


# -- losses ------------------------------------------------------------------

def test_kl_zero_at_equality():
    x = np.random.default_rng(0).normal(size=(6, 5))
    assert kl_feature_loss(x, x.copy()) == 0.0


def test_kl_point_mass_vs_uniform():
    x = np.array([[40.0, -40.0]])  # softmax is numerically [1, 0]
    z = np.array([[0.0, 0.0]])
    assert kl_feature_loss(x, z) == pytest.approx(np.log(2.0), abs=1e-6)


def test_kl_shape_mismatch_rejected():
    with pytest.raises(ValidationError):
        kl_feature_loss(np.ones((2, 3)), np.ones((3, 2)))


def test_kl_matches_manual_formula():
    rng = np.random.default_rng(7)
    x, z = rng.normal(size=(4, 6)), rng.normal(size=(4, 6))
    p, q = softmax_rows(x), softmax_rows(z)
    manual = float((p * (np.log(p) - np.log(q))).sum())
    assert kl_feature_loss(x, z) == pytest.approx(manual, rel=1e-12)


@given(feature_matrices(), st.integers(min_value=0, max_value=2 ** 16))
@settings(max_examples=60, deadline=None)
def test_kl_non_negative(x, seed):
    z = np.random.default_rng(seed).normal(size=x.shape)
    assert kl_feature_loss(x, z) >= 0.0


def test_adjacency_loss_at_zero_embeddings(triangle):
    h = np.zeros((3, 4))
    assert adjacency_loss(h, triangle, mode="full") == pytest.approx(np.log(2.0))


def test_adjacency_loss_at_zero_no_edges():
    g, _ = Graph.from_edges(3, [])
    assert adjacency_loss(np.zeros((3, 4)), g, mode="full") == pytest.approx(np.log(2.0))


def test_adjacency_loss_two_node_brute_force():
    g, _ = Graph.from_edges(2, [(0, 1)])
    h = np.array([[1.0, 3.0], [1.0, 3.0]])  # dot products all 10
    z = h @ h.T
    a = np.array([[0.0, 1.0], [1.0, 0.0]])  # diagonal treated as non-edge
    manual = 0.0
    for i in range(2):
        for j in range(2):
            p = 1.0 / (1.0 + np.exp(-z[i, j]))
            manual -= a[i, j] * np.log(p) + (1 - a[i, j]) * np.log(1 - p)
    manual /= 4.0
    assert adjacency_loss(h, g, mode="full") == pytest.approx(manual, rel=1e-9)


def test_adjacency_loss_decreases_with_alignment(path3):
    aligned = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]) * 2.0
    scattered = np.array([[2.0, 0.0], [-2.0, 0.0], [2.0, 0.0]])
    assert adjacency_loss(aligned, path3, "full") < adjacency_loss(scattered, path3, "full")


def test_sampled_adjacency_close_to_full_on_balanced_graph():
    """Both modes average BCE over positives and (all or sampled) negatives.

    With every negative sampled many times the sampled estimate should
    land near a positives-plus-negatives reweighting of the full loss;
    here we only check the two agree within a loose statistical band.
    """
    ds = random_dataset(np.random.default_rng(0), n=12, p_edge=0.5)
    h = np.random.default_rng(1).normal(size=(12, 6)) * 0.1
    full = adjacency_loss(h, ds.graph, "full")
    sampled = np.mean([
        adjacency_loss(h, ds.graph, "sampled", rng=np.random.default_rng(k))
        for k in range(64)
    ])
    # at small h both modes sit near log 2; the diagonal and class-balance
    # differences keep them from matching exactly
    assert abs(sampled - full) < 0.05


def test_sampled_mode_rejects_complete_graph():
    g, _ = Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
    with pytest.raises(ValidationError, match="complete"):
        adjacency_loss(np.ones((3, 2)), g, "sampled")


def test_adjacency_row_mismatch_rejected(triangle):
    with pytest.raises(ValidationError):
        adjacency_loss(np.zeros((4, 2)), triangle, "full")


def test_total_loss_pure_ego():
    assert total_loss(3.0, 7.0, 11.0, alpha=1.0, beta=1.0) == 3.0


def test_total_loss_pure_adjacency():
    assert total_loss(3.0, 7.0, 11.0, alpha=0.3, beta=0.0) == 11.0


def test_total_loss_arithmetic_example():
    assert total_loss(2.0, 4.0, 1.0, alpha=0.5, beta=0.5) == pytest.approx(2.0)


def test_total_loss_masks_tasks():
    assert total_loss(2.0, 4.0, 1.0, 0.5, 0.5, frozenset({"ego"})) == pytest.approx(0.5)
    assert total_loss(2.0, 4.0, 1.0, 0.5, 0.5, frozenset({"adj"})) == pytest.approx(0.5)


@given(
    st.floats(min_value=0, max_value=1),
    st.floats(min_value=0, max_value=1),
)
@settings(max_examples=60, deadline=None)
def test_total_loss_affine_coefficients(alpha, beta):
    """Probing with unit losses recovers the three mixing coefficients."""
    base = total_loss(0.0, 0.0, 0.0, alpha, beta)
    c_ego = total_loss(1.0, 0.0, 0.0, alpha, beta) - base
    c_agg = total_loss(0.0, 1.0, 0.0, alpha, beta) - base
    c_adj = total_loss(0.0, 0.0, 1.0, alpha, beta) - base
    assert base == 0.0
    assert c_ego == pytest.approx(beta * alpha, abs=1e-12)
    assert c_agg == pytest.approx(beta * (1.0 - alpha), abs=1e-12)
    assert c_adj == pytest.approx(1.0 - beta, abs=1e-12)


# -- gradients ---------------------------------------------------------------

def grad_check_toy(**cfg_kw):
    """grad_check over every parameter of the combined loss on a toy graph."""
    from mvge.model import _train_step
    from mvge.graph import normalized_adjacency as na

    ds = random_dataset(np.random.default_rng(3), n=8, f=2, c=2, p_edge=0.4)
    cfg = toy_cfg(dim_ego=3, dim_agg=3, hidden_dim=4, **cfg_kw)
    views = build_views(ds.graph, ds.features, cfg.walk_config())
    s = na(ds.graph)
    model = MVGEModel(cfg, views.x_ego.shape[1], views.x_agg.shape[1])
    p_ego = softmax_rows(views.x_ego)
    p_agg = softmax_rows(views.x_agg)
    mode = cfg.resolve_adj_mode(ds.graph.num_nodes)

    def loss():
        rng = np.random.default_rng(7)  # fixed stream keeps sampled mode smooth
        _, _, _, l_t = _train_step(model, views, s, ds.graph, p_ego, p_agg, mode, rng)
        return l_t

    return grad_check(loss, model.params, max_entries_per_param=12)


def test_gradients_full_model():
    assert grad_check_toy() < 1e-4


def test_gradients_gcn_ego_variant():
    assert grad_check_toy(ego_encoder="gcn") < 1e-4


def test_gradients_sum_merge():
    assert grad_check_toy(merge_fn="sum") < 1e-4


def test_gradients_sampled_adjacency():
    assert grad_check_toy(adj_loss_mode="sampled") < 1e-4


def test_gradients_single_task_masks():
    assert grad_check_toy(task_mask=frozenset({"ego"})) < 1e-4
    assert grad_check_toy(task_mask=frozenset({"adj"})) < 1e-4


# -- training loop -----------------------------------------------------------

def test_two_epoch_toy_run():
    ds = random_dataset(np.random.default_rng(0), n=8, f=3, c=2, p_edge=0.4)
    _, emb, trace = train(ds, toy_cfg(epochs=2))
    assert len(trace) == 2
    assert np.all(np.isfinite(trace.l_total))
    assert np.all(np.isfinite(emb.h))
    assert emb.h.shape == (8, 12)


def test_trace_rows_format():
    ds = random_dataset(np.random.default_rng(0), n=8)
    _, _, trace = train(ds, toy_cfg(epochs=3))
    rows = trace.rows()
    assert [r[0] for r in rows] == [0, 1, 2]
    assert all(len(r) == 5 for r in rows)


def test_loss_descends_on_synthetic():
    spec = SynthSpec(
        num_nodes=500, num_classes=5, target_homophily=0.5, avg_degree=4.0,
        feature_dim=8, class_separation=1.0, noise_sigma=0.5, seed=0,
    )
    ds = generate_synthetic(spec)
    _, _, trace = train(ds, MVGEConfig(epochs=200, dim_ego=16, dim_agg=16, hidden_dim=32))
    assert trace.l_total[-1] < trace.l_total[0]


def test_same_seed_identical_embeddings():
    ds = random_dataset(np.random.default_rng(4), n=15)
    a = train(ds, toy_cfg(epochs=5, seed=9))[1]
    b = train(ds, toy_cfg(epochs=5, seed=9))[1]
    assert np.array_equal(a.h, b.h)
    assert np.array_equal(a.h_ego, b.h_ego)


def test_different_seed_differs():
    ds = random_dataset(np.random.default_rng(4), n=15)
    a = train(ds, toy_cfg(epochs=5, seed=1))[1]
    b = train(ds, toy_cfg(epochs=5, seed=2))[1]
    assert not np.array_equal(a.h, b.h)


def test_zero_epochs_returns_initial_embeddings():
    ds = random_dataset(np.random.default_rng(5), n=10)
    _, emb, trace = train(ds, toy_cfg(epochs=0))
    assert len(trace) == 0
    assert np.all(np.isfinite(emb.h))


def test_masked_task_logs_zero():
    ds = random_dataset(np.random.default_rng(6), n=10)
    _, _, trace = train(ds, toy_cfg(epochs=3, task_mask=frozenset({"ego"})))
    assert np.all(trace.l_agg == 0.0)
    assert np.all(trace.l_s == 0.0)
    assert np.all(trace.l_ego > 0.0)


def test_merged_matches_merge_fn():
    ds = random_dataset(np.random.default_rng(7), n=10)
    _, emb, _ = train(ds, toy_cfg(epochs=2))
    assert np.array_equal(emb.h, np.hstack([emb.h_ego, emb.h_agg]))
    _, emb_s, _ = train(ds, toy_cfg(epochs=2, merge_fn="sum"))
    assert np.allclose(emb_s.h, emb_s.h_ego + emb_s.h_agg)


def test_sampled_mode_trains(tmp_path):
    ds = random_dataset(np.random.default_rng(8), n=20, p_edge=0.3)
    _, emb, trace = train(ds, toy_cfg(epochs=4, adj_loss_mode="sampled"))
    assert np.all(np.isfinite(trace.l_s))
    assert np.all(np.isfinite(emb.h))


def test_diverged_error_carries_epoch():
    err = TrainingDivergedError(17, "boom")
    assert err.epoch == 17
    assert "boom" in str(err)


# -- config ------------------------------------------------------------------

def test_config_validation_errors():
    with pytest.raises(ValidationError):
        MVGEConfig(alpha=1.5)
    with pytest.raises(ValidationError):
        MVGEConfig(beta=-0.1)
    with pytest.raises(ValidationError):
        MVGEConfig(dim_ego=0)
    with pytest.raises(ValidationError):
        MVGEConfig(task_mask=frozenset())
    with pytest.raises(ValidationError):
        MVGEConfig(task_mask=frozenset({"ego", "bogus"}))
    with pytest.raises(ValidationError):
        MVGEConfig(merge_fn="sum", dim_ego=32, dim_agg=64)
    with pytest.raises(ValidationError):
        MVGEConfig(ego_encoder="transformer")
    with pytest.raises(ValidationError):
        MVGEConfig(lr=0.0)
    with pytest.raises(ValidationError):
        MVGEConfig(epochs=-1)


def test_config_embedding_dim():
    assert MVGEConfig().embedding_dim == 128
    assert MVGEConfig(merge_fn="sum").embedding_dim == 64
    assert MVGEConfig(dim_ego=10, dim_agg=20).embedding_dim == 30


def test_config_adj_mode_resolution():
    assert MVGEConfig().resolve_adj_mode(100) == "full"
    assert MVGEConfig().resolve_adj_mode(5001) == "sampled"
    assert MVGEConfig(adj_loss_mode="sampled").resolve_adj_mode(10) == "sampled"
    assert MVGEConfig(adj_loss_mode="full").resolve_adj_mode(10 ** 6) == "full"


# -- embedding statistics ----------------------------------------------------

def test_dim_std_constant_column_is_zero():
    h = np.column_stack([np.full(5, 3.0), np.arange(5, dtype=np.float64)])
    assert embedding_dim_std(h)[0] == 0.0


def test_dim_std_population_formula():
    assert embedding_dim_std(np.array([[0.0], [2.0]]))[0] == 1.0


def test_dim_std_needs_two_rows():
    with pytest.raises(ValidationError):
        embedding_dim_std(np.ones((1, 4)))


# -- grid search -------------------------------------------------------------

def test_grid_search_table_and_argmax():
    ds = random_dataset(np.random.default_rng(9), n=24, f=3, c=2, p_edge=0.25)
    cfg = toy_cfg(epochs=2, dim_ego=4, dim_agg=4, hidden_dim=4)
    alpha, beta, table = grid_search_alpha_beta(ds, cfg, grid_step=0.5)
    assert len(table) == 9  # (1/0.5 + 1)^2
    best = max(t[2] for t in table)
    found = [t for t in table if t[0] == alpha and t[1] == beta]
    assert found and found[0][2] == best


def test_grid_search_full_grid_size():
    ds = random_dataset(np.random.default_rng(10), n=12, f=2, c=2, p_edge=0.3)
    cfg = toy_cfg(epochs=1, dim_ego=2, dim_agg=2, hidden_dim=2)
    _, _, table = grid_search_alpha_beta(ds, cfg, grid_step=0.1)
    assert len(table) == 121
    alphas = sorted({t[0] for t in table})
    assert alphas == pytest.approx([i / 10 for i in range(11)])


def test_grid_search_single_class_tie_break():
    g, labels = random_dataset(np.random.default_rng(11), n=10, c=2).graph, np.zeros(10, dtype=np.int64)
    ds = make_dataset(g, np.random.default_rng(12).normal(size=(10, 3)), labels, num_classes=1)
    cfg = toy_cfg(epochs=1, dim_ego=2, dim_agg=2, hidden_dim=2)
    alpha, beta, table = grid_search_alpha_beta(ds, cfg, grid_step=0.5)
    assert all(t[2] == 1.0 for t in table)
    assert (alpha, beta) == (0.0, 0.0)


def test_grid_search_requires_labels():
    ds = random_dataset(np.random.default_rng(13), n=10)
    ds = make_dataset(ds.graph, ds.features, None, None)
    with pytest.raises(ValidationError, match="labels"):
        grid_search_alpha_beta(ds, toy_cfg())


def test_grid_search_rejects_bad_step():
    ds = random_dataset(np.random.default_rng(14), n=10)
    with pytest.raises(ValidationError):
        grid_search_alpha_beta(ds, toy_cfg(), grid_step=0.3)
