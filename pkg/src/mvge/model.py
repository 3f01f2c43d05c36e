"""Two-branch graph embedding network and its training loop.

One branch encodes raw node features through a pair of linear layers
with a concat skip; the other encodes walk-aggregated features through
a two-layer graph convolution with a concat skip. Each branch is
trained to reconstruct its own input under a row-softmax KL loss, and
the merged embedding is trained to reconstruct the adjacency matrix
through an inner-product decoder. The three losses combine as

    L = beta * (alpha * l_ego + (1 - alpha) * l_agg) + (1 - beta) * l_s.

Gradients are computed in closed form for this fixed graph; see
``numerics`` for the per-operation rules and the optimizer.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.special

from mvge.data import Dataset, EmbeddingSet
from mvge.graph import Graph, NormalizedAdjacency, ValidationError, normalized_adjacency
from mvge.numerics import (
    Adam,
    Param,
    concat_cols,
    concat_cols_backward,
    glorot,
    matmul_backward,
    relu,
    relu_backward,
    sigmoid,
    softmax_rows,
    softplus,
    spmm,
    spmm_backward,
)
from mvge.walks import AGGREGATORS, ViewPair, WalkConfig, build_views

MERGE_FNS = ("concat", "sum", "mean")
TASKS = ("ego", "agg", "adj")
EGO_ENCODERS = ("linear", "gcn")
ADJ_LOSS_MODES = ("auto", "full", "sampled")

# node count above which "auto" switches the adjacency loss to sampling
FULL_ADJ_MAX_NODES = 5000

# RNG stream tags >= 2**32 so they can never collide with per-node walk streams
_INIT_TAG = 2**32 + 1
_NEG_TAG = 2**32 + 2
_VAL_TAG = 2**32 + 3

_LOG_FLOOR = 1e-12


class TrainingDivergedError(RuntimeError):
    """Raised when the loss turns non-finite; carries the epoch index."""

    def __init__(self, epoch: int, message: str):
        super().__init__(message)
        self.epoch = epoch


@dataclass(frozen=True)
class MVGEConfig:
    """Everything that determines a training run, walks included."""

    dim_ego: int = 64
    dim_agg: int = 64
    hidden_dim: int = 128
    alpha: float = 0.5
    beta: float = 0.8
    epochs: int = 200
    lr: float = 0.01
    seed: int = 0
    walk_lengths: tuple[int, ...] = (3, 5, 10)
    aggr: str = "concat"
    merge_fn: str = "concat"
    task_mask: frozenset[str] = frozenset(TASKS)
    ego_encoder: str = "linear"
    adj_loss_mode: str = "auto"
    sample_ratio: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "walk_lengths", tuple(int(x) for x in self.walk_lengths))
        object.__setattr__(self, "task_mask", frozenset(self.task_mask))
        for name in ("dim_ego", "dim_agg", "hidden_dim"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must be in [0, 1], got {v}")
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs}")
        if self.lr <= 0.0:
            raise ValidationError(f"lr must be positive, got {self.lr}")
        if self.aggr not in AGGREGATORS:
            raise ValidationError(f"aggr must be one of {AGGREGATORS}, got {self.aggr!r}")
        if self.merge_fn not in MERGE_FNS:
            raise ValidationError(f"merge_fn must be one of {MERGE_FNS}, got {self.merge_fn!r}")
        if self.merge_fn in ("sum", "mean") and self.dim_ego != self.dim_agg:
            raise ValidationError(
                f"merge_fn {self.merge_fn!r} needs dim_ego == dim_agg, "
                f"got {self.dim_ego} and {self.dim_agg}"
            )
        bad = self.task_mask - set(TASKS)
        if bad:
            raise ValidationError(f"unknown tasks in task_mask: {sorted(bad)}")
        if not self.task_mask:
            raise ValidationError("task_mask must enable at least one task")
        if self.ego_encoder not in EGO_ENCODERS:
            raise ValidationError(
                f"ego_encoder must be one of {EGO_ENCODERS}, got {self.ego_encoder!r}"
            )
        if self.adj_loss_mode not in ADJ_LOSS_MODES:
            raise ValidationError(
                f"adj_loss_mode must be one of {ADJ_LOSS_MODES}, got {self.adj_loss_mode!r}"
            )
        if self.sample_ratio <= 0.0:
            raise ValidationError(f"sample_ratio must be positive, got {self.sample_ratio}")

    @property
    def embedding_dim(self) -> int:
        if self.merge_fn == "concat":
            return self.dim_ego + self.dim_agg
        return self.dim_ego

    def walk_config(self) -> WalkConfig:
        return WalkConfig(lengths=self.walk_lengths, aggr=self.aggr, seed=self.seed)

    def resolve_adj_mode(self, num_nodes: int) -> str:
        if self.adj_loss_mode != "auto":
            return self.adj_loss_mode
        return "full" if num_nodes <= FULL_ADJ_MAX_NODES else "sampled"


@dataclass(frozen=True)
class TrainTrace:
    """Per-epoch loss record; masked tasks are logged as 0.0."""

    l_ego: np.ndarray
    l_agg: np.ndarray
    l_s: np.ndarray
    l_total: np.ndarray

    def __len__(self) -> int:
        return len(self.l_total)

    def rows(self) -> list[tuple[int, float, float, float, float]]:
        return [
            (i, float(self.l_ego[i]), float(self.l_agg[i]),
             float(self.l_s[i]), float(self.l_total[i]))
            for i in range(len(self))
        ]


class MVGEModel:
    """Parameter container plus the forward passes of both branches.

    Parameters live in an insertion-ordered dict of ``Param`` so the
    optimizer and gradient checker can walk them uniformly. Biases
    exist only on the dense layers; graph-convolution layers are
    bias-free.
    """

    def __init__(self, cfg: MVGEConfig, f_ego: int, f_agg: int):
        self.cfg = cfg
        self.f_ego = f_ego
        self.f_agg = f_agg
        rng = np.random.default_rng([cfg.seed, _INIT_TAG])
        h = cfg.hidden_dim
        p: dict[str, Param] = {}
        if cfg.ego_encoder == "linear":
            p["ego_w1"] = Param(glorot(rng, f_ego, h))
            p["ego_b1"] = Param(np.zeros((1, h)))
        else:
            p["ego_w1"] = Param(glorot(rng, f_ego, h))
            p["ego_w2"] = Param(glorot(rng, h, h))
        p["ego_skip_w"] = Param(glorot(rng, f_ego + h, cfg.dim_ego))
        p["ego_skip_b"] = Param(np.zeros((1, cfg.dim_ego)))
        p["agg_w1"] = Param(glorot(rng, f_agg, h))
        p["agg_w2"] = Param(glorot(rng, h, h))
        p["agg_skip_w"] = Param(glorot(rng, f_agg + h, cfg.dim_agg))
        p["agg_skip_b"] = Param(np.zeros((1, cfg.dim_agg)))
        p["dec_ego_w"] = Param(glorot(rng, cfg.dim_ego, f_ego))
        p["dec_ego_b"] = Param(np.zeros((1, f_ego)))
        p["dec_agg_w"] = Param(glorot(rng, cfg.dim_agg, f_agg))
        p["dec_agg_b"] = Param(np.zeros((1, f_agg)))
        self.params = p

    def encode_ego(self, x: np.ndarray, s: NormalizedAdjacency | None = None):
        """Forward the raw-feature branch; returns (h_ego, cache)."""
        p = self.params
        if x.shape[1] != self.f_ego:
            raise ValidationError(f"expected {self.f_ego} ego features, got {x.shape[1]}")
        if self.cfg.ego_encoder == "linear":
            a1 = x @ p["ego_w1"].value + p["ego_b1"].value
            r1 = relu(a1)
            c1 = concat_cols(x, r1)
            h_ego = c1 @ p["ego_skip_w"].value + p["ego_skip_b"].value
            cache = {"x": x, "a1": a1, "c1": c1}
        else:
            if s is None:
                raise ValidationError("gcn ego encoder needs the normalized adjacency")
            s1 = spmm(s, x @ p["ego_w1"].value)
            g1 = relu(s1)
            s2 = spmm(s, g1 @ p["ego_w2"].value)
            g2 = relu(s2)
            c1 = concat_cols(x, g2)
            h_ego = c1 @ p["ego_skip_w"].value + p["ego_skip_b"].value
            cache = {"x": x, "s1": s1, "g1": g1, "s2": s2, "c1": c1, "s_op": s}
        return h_ego, cache

    def encode_agg(self, x_agg: np.ndarray, s: NormalizedAdjacency):
        """Forward the walk-feature branch; returns (h_agg, cache)."""
        p = self.params
        if x_agg.shape[1] != self.f_agg:
            raise ValidationError(f"expected {self.f_agg} agg features, got {x_agg.shape[1]}")
        s1 = spmm(s, x_agg @ p["agg_w1"].value)
        g1 = relu(s1)
        s2 = spmm(s, g1 @ p["agg_w2"].value)
        g2 = relu(s2)
        c2 = concat_cols(x_agg, g2)
        h_agg = c2 @ p["agg_skip_w"].value + p["agg_skip_b"].value
        cache = {"x": x_agg, "s1": s1, "g1": g1, "s2": s2, "c2": c2, "s_op": s}
        return h_agg, cache

    def embeddings(self, views: ViewPair, s: NormalizedAdjacency) -> EmbeddingSet:
        h_ego, _ = self.encode_ego(views.x_ego, s)
        h_agg, _ = self.encode_agg(views.x_agg, s)
        return EmbeddingSet(
            h_ego=h_ego, h_agg=h_agg,
            h=merge_embeddings(h_ego, h_agg, self.cfg.merge_fn),
        )

    def _backward_ego(self, d_h: np.ndarray, cache: dict) -> None:
        p = self.params
        d_c1, d_w = matmul_backward(d_h, cache["c1"], p["ego_skip_w"].value)
        p["ego_skip_w"].grad += d_w
        p["ego_skip_b"].grad += d_h.sum(axis=0, keepdims=True)
        if self.cfg.ego_encoder == "linear":
            _, d_r1 = concat_cols_backward(d_c1, cache["x"].shape[1])
            d_a1 = relu_backward(d_r1, cache["a1"])
            p["ego_w1"].grad += cache["x"].T @ d_a1
            p["ego_b1"].grad += d_a1.sum(axis=0, keepdims=True)
        else:
            _, d_g2 = concat_cols_backward(d_c1, cache["x"].shape[1])
            d_s2 = relu_backward(d_g2, cache["s2"])
            d_b2 = spmm_backward(cache["s_op"], d_s2)
            p["ego_w2"].grad += cache["g1"].T @ d_b2
            d_g1 = d_b2 @ p["ego_w2"].value.T
            d_s1 = relu_backward(d_g1, cache["s1"])
            d_b1 = spmm_backward(cache["s_op"], d_s1)
            p["ego_w1"].grad += cache["x"].T @ d_b1

    def _backward_agg(self, d_h: np.ndarray, cache: dict) -> None:
        p = self.params
        d_c2, d_w = matmul_backward(d_h, cache["c2"], p["agg_skip_w"].value)
        p["agg_skip_w"].grad += d_w
        p["agg_skip_b"].grad += d_h.sum(axis=0, keepdims=True)
        _, d_g2 = concat_cols_backward(d_c2, cache["x"].shape[1])
        d_s2 = relu_backward(d_g2, cache["s2"])
        d_b2 = spmm_backward(cache["s_op"], d_s2)
        p["agg_w2"].grad += cache["g1"].T @ d_b2
        d_g1 = d_b2 @ p["agg_w2"].value.T
        d_s1 = relu_backward(d_g1, cache["s1"])
        d_b1 = spmm_backward(cache["s_op"], d_s1)
        p["agg_w1"].grad += cache["x"].T @ d_b1


def merge_embeddings(h_ego: np.ndarray, h_agg: np.ndarray, fn: str) -> np.ndarray:
    if fn not in MERGE_FNS:
        raise ValidationError(f"merge_fn must be one of {MERGE_FNS}, got {fn!r}")
    if h_ego.shape[0] != h_agg.shape[0]:
        raise ValidationError("row count mismatch between views")
    if fn == "concat":
        return concat_cols(h_ego, h_agg)
    if h_ego.shape[1] != h_agg.shape[1]:
        raise ValidationError(
            f"merge_fn {fn!r} needs matching dims, got {h_ego.shape[1]} and {h_agg.shape[1]}"
        )
    return h_ego + h_agg if fn == "sum" else (h_ego + h_agg) / 2.0


def kl_feature_loss(targets: np.ndarray, recon: np.ndarray) -> float:
    """KL divergence between row-softmaxed targets and reconstructions.

    The target distribution is treated as fixed; only the
    reconstruction side carries gradient (which is softmax(recon) -
    softmax(targets) with respect to the reconstruction logits).
    """
    if targets.shape != recon.shape:
        raise ValidationError(f"shape mismatch: {targets.shape} vs {recon.shape}")
    p = softmax_rows(np.asarray(targets, dtype=np.float64))
    q = softmax_rows(np.asarray(recon, dtype=np.float64))
    logs = np.log(np.maximum(p, _LOG_FLOOR)) - np.log(np.maximum(q, _LOG_FLOOR))
    return float((p * logs).sum())


def _kl_terms(p: np.ndarray, recon: np.ndarray):
    """Loss and logit gradient for a precomputed target distribution."""
    q = softmax_rows(recon)
    logs = np.log(np.maximum(p, _LOG_FLOOR)) - np.log(np.maximum(q, _LOG_FLOOR))
    return float((p * logs).sum()), q - p


def adjacency_loss(h: np.ndarray, g: Graph, mode: str = "full",
                   rng: np.random.Generator | None = None,
                   sample_ratio: float = 1.0) -> float:
    """Cross-entropy between sigmoid(H H^T) and the adjacency matrix."""
    loss, _ = _adjacency_terms(h, g, mode, rng=rng, sample_ratio=sample_ratio,
                               want_grad=False)
    return loss


def _directed_pairs(g: Graph):
    rows = np.repeat(np.arange(g.num_nodes, dtype=np.int64), g.degrees)
    return rows, g.neighbors


def _adjacency_terms(h: np.ndarray, g: Graph, mode: str,
                     rng: np.random.Generator | None = None,
                     sample_ratio: float = 1.0, want_grad: bool = True):
    if h.shape[0] != g.num_nodes:
        raise ValidationError(f"embedding rows {h.shape[0]} != num_nodes {g.num_nodes}")
    n = g.num_nodes
    if mode == "full":
        z = h @ h.T
        rows, cols = _directed_pairs(g)
        # sum over entries of softplus(-z) + (1 - a) z, diagonal counted as negatives
        loss = (softplus(-z).sum() + z.sum() - z[rows, cols].sum()) / (n * n)
        if not want_grad:
            return float(loss), None
        grad_z = scipy.special.expit(z, out=z)
        grad_z[rows, cols] -= 1.0
        d_h = (2.0 / (n * n)) * (grad_z @ h)
        return float(loss), d_h
    if mode != "sampled":
        raise ValidationError(f"adjacency loss mode must be full or sampled, got {mode!r}")
    if rng is None:
        rng = np.random.default_rng(0)
    pr, pc = _directed_pairs(g)
    n_pos = pr.size
    if n_pos == 0:
        raise ValidationError("sampled adjacency loss needs at least one edge")
    n_neg = max(1, int(round(sample_ratio * n_pos)))
    if n * (n - 1) - n_pos <= 0:
        raise ValidationError("graph is complete, no negative pairs to sample")
    nr = np.empty(n_neg, dtype=np.int64)
    nc = np.empty(n_neg, dtype=np.int64)
    got = 0
    while got < n_neg:
        cand_r = rng.integers(0, n, size=(n_neg - got) * 2)
        cand_c = rng.integers(0, n, size=(n_neg - got) * 2)
        ok = (cand_r != cand_c) & ~g.has_edge_mask(cand_r, cand_c)
        take = min(int(ok.sum()), n_neg - got)
        nr[got:got + take] = cand_r[ok][:take]
        nc[got:got + take] = cand_c[ok][:take]
        got += take
    z_pos = np.einsum("ij,ij->i", h[pr], h[pc])
    z_neg = np.einsum("ij,ij->i", h[nr], h[nc])
    total = n_pos + n_neg
    loss = (softplus(-z_pos).sum() + (z_neg + softplus(-z_neg)).sum()) / total
    if not want_grad:
        return float(loss), None
    coef_pos = (sigmoid(z_pos) - 1.0) / total
    coef_neg = sigmoid(z_neg) / total
    d_h = np.zeros_like(h)
    np.add.at(d_h, pr, coef_pos[:, None] * h[pc])
    np.add.at(d_h, pc, coef_pos[:, None] * h[pr])
    np.add.at(d_h, nr, coef_neg[:, None] * h[nc])
    np.add.at(d_h, nc, coef_neg[:, None] * h[nr])
    return float(loss), d_h


def total_loss(l_ego: float, l_agg: float, l_s: float,
               alpha: float, beta: float,
               task_mask: frozenset[str] = frozenset(TASKS)) -> float:
    """Combined objective; masked tasks contribute exactly zero."""
    e = l_ego if "ego" in task_mask else 0.0
    a = l_agg if "agg" in task_mask else 0.0
    s = l_s if "adj" in task_mask else 0.0
    return beta * (alpha * e + (1.0 - alpha) * a) + (1.0 - beta) * s


def _train_step(model: MVGEModel, views: ViewPair, s: NormalizedAdjacency,
                g: Graph, p_ego: np.ndarray, p_agg: np.ndarray,
                adj_mode: str, neg_rng: np.random.Generator):
    """One forward/backward pass; gradients are left in model.params."""
    cfg = model.cfg
    mask = cfg.task_mask
    h_ego, cache_ego = model.encode_ego(views.x_ego, s)
    h_agg, cache_agg = model.encode_agg(views.x_agg, s)
    h = merge_embeddings(h_ego, h_agg, cfg.merge_fn)
    params = model.params

    l_ego = l_agg = l_s = 0.0
    d_h_ego = np.zeros_like(h_ego)
    d_h_agg = np.zeros_like(h_agg)

    if "ego" in mask:
        recon = h_ego @ params["dec_ego_w"].value + params["dec_ego_b"].value
        l_ego, d_recon = _kl_terms(p_ego, recon)
        w = cfg.beta * cfg.alpha
        if w != 0.0:
            d_recon = w * d_recon
            params["dec_ego_w"].grad += h_ego.T @ d_recon
            params["dec_ego_b"].grad += d_recon.sum(axis=0, keepdims=True)
            d_h_ego += d_recon @ params["dec_ego_w"].value.T
    if "agg" in mask:
        recon = h_agg @ params["dec_agg_w"].value + params["dec_agg_b"].value
        l_agg, d_recon = _kl_terms(p_agg, recon)
        w = cfg.beta * (1.0 - cfg.alpha)
        if w != 0.0:
            d_recon = w * d_recon
            params["dec_agg_w"].grad += h_agg.T @ d_recon
            params["dec_agg_b"].grad += d_recon.sum(axis=0, keepdims=True)
            d_h_agg += d_recon @ params["dec_agg_w"].value.T
    if "adj" in mask:
        l_s, d_h_adj = _adjacency_terms(h, g, adj_mode, rng=neg_rng,
                                        sample_ratio=cfg.sample_ratio)
        w = 1.0 - cfg.beta
        if w != 0.0:
            d_h_adj = w * d_h_adj
            if cfg.merge_fn == "concat":
                d_h_ego += d_h_adj[:, :cfg.dim_ego]
                d_h_agg += d_h_adj[:, cfg.dim_ego:]
            elif cfg.merge_fn == "sum":
                d_h_ego += d_h_adj
                d_h_agg += d_h_adj
            else:
                d_h_ego += 0.5 * d_h_adj
                d_h_agg += 0.5 * d_h_adj

    model._backward_ego(d_h_ego, cache_ego)
    model._backward_agg(d_h_agg, cache_agg)
    l_tot = total_loss(l_ego, l_agg, l_s, cfg.alpha, cfg.beta, mask)
    return l_ego if "ego" in mask else 0.0, \
        l_agg if "agg" in mask else 0.0, \
        l_s if "adj" in mask else 0.0, l_tot


def train(ds: Dataset, cfg: MVGEConfig, *, views: ViewPair | None = None):
    """Full-batch training for cfg.epochs; deterministic per seed.

    Returns (model, embeddings, trace). Raises TrainingDivergedError
    with the offending epoch index if any loss turns non-finite.
    ``views`` may be passed to reuse precomputed walk features; they
    must come from this dataset with this config's walk settings.
    """
    ds.validate()
    g = ds.graph
    if views is None:
        views = build_views(g, ds.features, cfg.walk_config())
    s = normalized_adjacency(g)
    model = MVGEModel(cfg, f_ego=views.x_ego.shape[1], f_agg=views.x_agg.shape[1])
    p_ego = softmax_rows(views.x_ego)
    p_agg = softmax_rows(views.x_agg)
    adj_mode = cfg.resolve_adj_mode(g.num_nodes)
    neg_rng = np.random.default_rng([cfg.seed, _NEG_TAG])
    opt = Adam(model.params, lr=cfg.lr)

    trace = np.zeros((cfg.epochs, 4), dtype=np.float64)
    for epoch in range(cfg.epochs):
        l_e, l_a, l_s, l_t = _train_step(model, views, s, g, p_ego, p_agg,
                                         adj_mode, neg_rng)
        trace[epoch] = (l_e, l_a, l_s, l_t)
        if not np.isfinite(l_t):
            raise TrainingDivergedError(
                epoch, f"non-finite loss {l_t!r} at epoch {epoch}"
            )
        opt.step()

    emb = model.embeddings(views, s)
    if not (np.isfinite(emb.h).all() and np.isfinite(emb.h_ego).all()
            and np.isfinite(emb.h_agg).all()):
        raise TrainingDivergedError(cfg.epochs, "non-finite embeddings after training")
    return model, emb, TrainTrace(
        l_ego=trace[:, 0].copy(), l_agg=trace[:, 1].copy(),
        l_s=trace[:, 2].copy(), l_total=trace[:, 3].copy(),
    )


def embedding_dim_std(h: np.ndarray) -> np.ndarray:
    """Population standard deviation of each embedding dimension."""
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] < 2:
        raise ValidationError(f"need a matrix with >= 2 rows, got shape {h.shape}")
    return h.std(axis=0, ddof=0)


def grid_search_alpha_beta(ds: Dataset, cfg: MVGEConfig, grid_step: float = 0.1,
                           val_fraction: float = 0.7):
    """Pick (alpha, beta) by validation Micro-F1 over the full grid.

    Trains one model per grid point (walk features computed once and
    shared), scores a logistic-regression probe on a fixed held-out
    node split, and returns (best_alpha, best_beta, table) where the
    table lists (alpha, beta, score) rows in grid order. Ties keep the
    earliest point, so the lowest alpha and then the lowest beta.
    """
    from mvge.evaluate import LogRegModel, micro_f1

    if ds.labels is None:
        raise ValidationError("grid search needs labels")
    if not 0.0 < grid_step <= 1.0:
        raise ValidationError(f"grid_step must be in (0, 1], got {grid_step}")
    steps = int(round(1.0 / grid_step))
    if abs(steps * grid_step - 1.0) > 1e-9:
        raise ValidationError(f"grid_step {grid_step} must divide 1 evenly")
    if not 0.0 < val_fraction < 1.0:
        raise ValidationError(f"val_fraction must be in (0, 1), got {val_fraction}")

    views = build_views(ds.graph, ds.features, cfg.walk_config())
    n = ds.num_nodes
    rng = np.random.default_rng([cfg.seed, _VAL_TAG])
    perm = rng.permutation(n)
    n_train = int(round((1.0 - val_fraction) * n))
    n_train = min(max(n_train, 1), n - 1)
    train_idx, val_idx = perm[:n_train], perm[n_train:]

    values = [i / steps for i in range(steps + 1)]
    table: list[tuple[float, float, float]] = []
    best = (-1.0, 0.0, 0.0)
    for a in values:
        for b in values:
            point = replace(cfg, alpha=a, beta=b)
            _, emb, _ = train(ds, point, views=views)
            clf = LogRegModel()
            clf.fit(emb.h[train_idx], ds.labels[train_idx],
                    num_classes=ds.num_classes)
            score = micro_f1(ds.labels[val_idx], clf.predict(emb.h[val_idx]))
            table.append((a, b, score))
            if score > best[0]:
                best = (score, a, b)
    return best[1], best[2], table
