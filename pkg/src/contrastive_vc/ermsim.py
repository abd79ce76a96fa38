"""Synthetic ERM experiment: sample labeled tuples from a random ground-truth
embedding, fit an embedding by gradient descent, and compare the measured
generalization gap with :func:`~contrastive_vc.bounds.predict_gap`."""

from __future__ import annotations

import statistics
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .bounds import predict_gap
from .errors import DomainError, KinkDetected, SeparationRejectionLimit
from .parallel import map_ordered

MARGIN_TRIPLET = "margin_triplet"
SOFTMAX = "softmax_contrastive"
LOSSES = (MARGIN_TRIPLET, SOFTMAX)


@dataclass(frozen=True)
class SimConfig:
    n: int = 50
    gt_dim: int = 3
    model_dim: int = 3
    p: int = 2
    m_train: int = 500
    m_test: int = 10_000
    k: int = 1
    loss: str = MARGIN_TRIPLET
    alpha: float | None = None
    eta: float = 0.0
    seeds: tuple[int, ...] = (0,)
    steps: int = 1500
    lr: float = 0.5
    decay_every: int = 500
    restarts: int = 5
    margin: float = 1.0
    rejection_cap: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if self.n < self.k + 2:
            raise DomainError("need at least k + 2 points")
        if min(self.gt_dim, self.model_dim, self.p, self.k) < 1:
            raise DomainError("dimensions, p and k must be positive")
        if self.m_train < 0 or self.m_test < 1:
            raise DomainError("need m_train >= 0 and m_test >= 1")
        if not 0 <= self.eta < 0.5:
            raise DomainError("label noise must lie in [0, 1/2)")
        if self.alpha is not None and not 0 < self.alpha < 1:
            raise DomainError("alpha must lie in (0, 1)")
        if self.loss not in LOSSES:
            raise DomainError(f"unknown loss {self.loss!r}")
        if not self.seeds:
            raise DomainError("need at least one seed")
        if self.steps < 0 or self.restarts < 1 or self.decay_every < 1 or self.lr <= 0:
            raise DomainError("bad optimizer budget")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["seeds"] = list(self.seeds)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown simulation fields: {sorted(unknown)}")
        data = dict(data)
        if "seeds" in data:
            data["seeds"] = tuple(data["seeds"])
        return cls(**data)


# ---------------------------------------------------------------------------
# data


def _distances(points, anchors, cands, p):
    diff = points[anchors][:, None, :] - points[cands]
    return np.sum(np.abs(diff) ** p, axis=2)


def sample_tuples(rng, cfg: SimConfig, points, m: int):
    """``m`` tuples ``(x, c_1..c_{k+1})`` of distinct points with labels
    (index of the candidate closest to ``x`` in ground truth, then flipped
    to a uniformly random other candidate with probability ``eta``)."""
    width = cfg.k + 2
    out_t = np.empty((0, width), dtype=np.int64)
    out_y = np.empty(0, dtype=np.int64)
    tries = 0
    while len(out_t) < m:
        need = m - len(out_t)
        batch = np.array([rng.choice(cfg.n, width, replace=False) for _ in range(need)],
                         dtype=np.int64).reshape(need, width)
        dist = _distances(points, batch[:, 0], batch[:, 1:], cfg.p)
        keep = np.ones(need, dtype=bool)
        # ties have probability zero for continuous points but are dropped anyway
        srt = np.sort(dist, axis=1)
        keep &= srt[:, 0] < srt[:, 1]
        if cfg.alpha is not None:
            # separation on the norm itself: (1 + alpha) * near < far
            keep &= (1 + cfg.alpha) ** cfg.p * srt[:, 0] < srt[:, 1]
        tries += need
        if tries > cfg.rejection_cap * max(m, 1):
            raise SeparationRejectionLimit(f"accepted {len(out_t)} of {m} tuples after {tries} draws")
        out_t = np.concatenate([out_t, batch[keep]])
        out_y = np.concatenate([out_y, np.argmin(dist[keep], axis=1)])
    labels = out_y.copy()
    if cfg.eta > 0 and m:
        flip = rng.random(m) < cfg.eta
        shift = rng.integers(1, cfg.k + 1, size=m)
        labels = np.where(flip, (labels + shift) % (cfg.k + 1), labels)
    return out_t, labels


# ---------------------------------------------------------------------------
# losses


def predict(theta, tuples, cfg: SimConfig):
    """Labels the fitted embedding assigns: closest candidate in ``l_p`` for
    the margin loss, largest inner product for the softmax loss."""
    if len(tuples) == 0:
        return np.empty(0, dtype=np.int64)
    if cfg.loss == SOFTMAX:
        scores = np.einsum("md,mcd->mc", theta[tuples[:, 0]], theta[tuples[:, 1:]])
        return np.argmax(scores, axis=1)
    return np.argmin(_distances(theta, tuples[:, 0], tuples[:, 1:], cfg.p), axis=1)


def error_rate(theta, tuples, labels, cfg) -> float:
    if len(tuples) == 0:
        return 0.0
    return float(np.mean(predict(theta, tuples, cfg) != labels))


def _split(tuples, labels):
    rows = np.arange(len(tuples))
    pos = tuples[rows, 1 + labels]
    mask = np.ones((len(tuples), tuples.shape[1] - 1), dtype=bool)
    mask[rows, labels] = False
    neg = tuples[:, 1:][mask].reshape(len(tuples), -1)
    return tuples[:, 0], pos, neg


def _pow_grad(diff, p):
    # d/d diff of sum |diff|^p
    if p == 2:
        return 2 * diff
    return p * np.abs(diff) ** (p - 1) * np.sign(diff)


def _scatter(grad, idx, vals):
    # np.add.at, but via bincount (much faster for many repeated indices)
    n = grad.shape[0]
    for j in range(grad.shape[1]):
        grad[:, j] += np.bincount(idx, weights=vals[:, j], minlength=n)


def margin_hinge_args(theta, tuples, labels, cfg):
    """``D(x, y+) - D(x, z-) + margin`` for every (tuple, negative) pair."""
    x, pos, neg = _split(tuples, labels)
    dp = np.sum(np.abs(theta[x] - theta[pos]) ** cfg.p, axis=1)
    dn = np.sum(np.abs(theta[x][:, None, :] - theta[neg]) ** cfg.p, axis=2)
    return dp[:, None] - dn + cfg.margin


def loss_and_grad(theta, tuples, labels, cfg: SimConfig):
    """Mean loss over the tuples and its gradient with respect to ``theta``."""
    m = len(tuples)
    grad = np.zeros_like(theta)
    if m == 0:
        return 0.0, grad
    x, pos, neg = _split(tuples, labels)
    if cfg.loss == MARGIN_TRIPLET:
        dpos = theta[x] - theta[pos]
        dneg = theta[x][:, None, :] - theta[neg]
        h = (np.sum(np.abs(dpos) ** cfg.p, axis=1)[:, None]
             - np.sum(np.abs(dneg) ** cfg.p, axis=2) + cfg.margin)
        active = h > 0
        loss = float(np.sum(h[active])) / m
        w = active.astype(float) / m
        gp = _pow_grad(dpos, cfg.p) * w.sum(axis=1)[:, None]
        gn = _pow_grad(dneg, cfg.p) * w[:, :, None]
        _scatter(grad, x, gp - gn.sum(axis=1))
        _scatter(grad, pos, -gp)
        _scatter(grad, neg.ravel(), gn.reshape(-1, theta.shape[1]))
        return loss, grad
    # softmax over inner products, positive in column 0
    cand = np.concatenate([pos[:, None], neg], axis=1)
    ax = theta[x]
    vc = theta[cand]
    s = np.einsum("md,mcd->mc", ax, vc)
    s_max = s.max(axis=1, keepdims=True)
    e = np.exp(s - s_max)
    prob = e / e.sum(axis=1, keepdims=True)
    loss = float(np.mean(np.log(e.sum(axis=1)) + s_max[:, 0] - s[:, 0]))
    coef = prob.copy()
    coef[:, 0] -= 1.0
    coef /= m
    _scatter(grad, x, np.einsum("mc,mcd->md", coef, vc))
    _scatter(grad, cand.ravel(), (coef[:, :, None] * ax[:, None, :]).reshape(-1, theta.shape[1]))
    return loss, grad


def gradient_check(cfg: SimConfig, tuples, labels, theta, h: float = 1e-5) -> float:
    """Relative error ``|fd - g| / max(|fd|, |g|)`` (Euclidean norms) between
    the analytic gradient ``g`` and central finite differences ``fd``.

    Raises :class:`KinkDetected` when a margin hinge changes sign anywhere in
    the stencil (the loss is not differentiable there).
    """
    if h <= 0:
        raise DomainError("step h must be positive")
    tuples = np.atleast_2d(np.asarray(tuples, dtype=np.int64))
    labels = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    theta = np.asarray(theta, dtype=float)
    _, analytic = loss_and_grad(theta, tuples, labels, cfg)
    base_sign = None
    if cfg.loss == MARGIN_TRIPLET:
        base_sign = np.sign(margin_hinge_args(theta, tuples, labels, cfg))
        if np.any(base_sign == 0):
            raise KinkDetected("hinge exactly at its kink")
    flat = theta.ravel()
    fd = np.zeros(flat.size)
    for i in range(flat.size):
        vals = []
        for step in (h, -h):
            pert = flat.copy()
            pert[i] += step
            t = pert.reshape(theta.shape)
            if base_sign is not None and np.any(np.sign(margin_hinge_args(t, tuples, labels, cfg)) != base_sign):
                raise KinkDetected(f"hinge switches within h of coordinate {i}")
            vals.append(loss_and_grad(t, tuples, labels, cfg)[0])
        fd[i] = (vals[0] - vals[1]) / (2 * h)
    an = analytic.ravel()
    scale = max(np.linalg.norm(fd), np.linalg.norm(an))
    return float(np.linalg.norm(fd - an) / scale) if scale > 0 else 0.0


# ---------------------------------------------------------------------------
# optimisation


def fit(rng, cfg: SimConfig, tuples, labels):
    """Gradient descent with a step decay that does not depend on the
    budget; returns the iterate with the lowest training error over all
    restarts (initialisations included) and that error."""
    best_theta, best_err = None, np.inf
    for _ in range(cfg.restarts):
        theta = rng.uniform(0.0, 1.0, (cfg.n, cfg.model_dim))
        for step in range(cfg.steps + 1):
            err = error_rate(theta, tuples, labels, cfg)
            if err < best_err:
                best_theta, best_err = theta.copy(), err
            if step == cfg.steps or len(tuples) == 0:
                break
            _, grad = loss_and_grad(theta, tuples, labels, cfg)
            lr = cfg.lr * 0.5 ** (step // cfg.decay_every)
            theta = theta - lr * grad
    return best_theta, best_err


@dataclass(frozen=True)
class SeedResult:
    seed: int
    train_error: float
    test_error: float
    gap: float
    init_train_error: float
    bayes_test_error: float

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    train_error: float
    test_error: float
    gap: float
    predicted_eps: float
    ratio: float
    per_seed: tuple[SeedResult, ...] = field(default_factory=tuple)

    def to_dict(self):
        return {"config": self.config.to_dict(), "train_error": self.train_error,
                "test_error": self.test_error, "gap": self.gap,
                "predicted_eps": self.predicted_eps, "ratio": self.ratio,
                "per_seed": [r.to_dict() for r in self.per_seed]}

    def csv_rows(self):
        c = self.config
        for r in self.per_seed:
            yield {"seed": r.seed, "n": c.n, "d_model": c.model_dim, "p": c.p, "k": c.k,
                   "m_train": c.m_train, "train_err": r.train_error, "test_err": r.test_error,
                   "gap": r.gap, "predicted_eps": self.predicted_eps,
                   "ratio": r.gap / self.predicted_eps if self.predicted_eps else float("nan")}


CSV_COLUMNS = ("seed", "n", "d_model", "p", "k", "m_train", "train_err", "test_err", "gap",
               "predicted_eps", "ratio")


def run_seed(cfg: SimConfig, seed: int) -> SeedResult:
    ss = np.random.SeedSequence([seed])
    data_ss, fit_ss = ss.spawn(2)
    rng = np.random.default_rng(data_ss)
    points = rng.uniform(0.0, 1.0, (cfg.n, cfg.gt_dim))
    train_t, train_y = sample_tuples(rng, cfg, points, cfg.m_train)
    test_t, test_y = sample_tuples(rng, cfg, points, cfg.m_test)
    fit_rng = np.random.default_rng(fit_ss)
    init = np.random.default_rng(fit_ss).uniform(0.0, 1.0, (cfg.n, cfg.model_dim))
    theta, train_err = fit(fit_rng, cfg, train_t, train_y)
    test_err = error_rate(theta, test_t, test_y, cfg)
    # ground truth classifies the noisy test labels with error ~ eta
    truth_cfg = replace(cfg, loss=MARGIN_TRIPLET)
    bayes = error_rate(points, test_t, test_y, truth_cfg)
    return SeedResult(seed, train_err, test_err, test_err - train_err,
                      error_rate(init, train_t, train_y, cfg), bayes)


def run_sim(cfg: SimConfig, workers: int = 1) -> SimResult:
    """Run every seed and report medians; seeds are independent, so the
    result is the same for any worker count."""
    per_seed = tuple(map_ordered(_RunSeed(cfg), cfg.seeds, workers))
    train = statistics.median(r.train_error for r in per_seed)
    test = statistics.median(r.test_error for r in per_seed)
    gap = statistics.median(r.gap for r in per_seed)
    eps = predict_gap(cfg.n, cfg.m_train, cfg.k)
    return SimResult(cfg, train, test, gap, eps, gap / eps, per_seed)


class _RunSeed:
    # picklable callable for the process pool
    def __init__(self, cfg):
        self.cfg = cfg

    def __call__(self, seed):
        return run_seed(self.cfg, seed)
