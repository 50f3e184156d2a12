"""Adversarial feature generation.

A generator maps (malicious feature, Gaussian noise) to a candidate
feature; a discriminator learns to tell generated features from benign
ones and doubles as the attacker's surrogate classifier. The generator
minimizes

    mean[ log D(G(f, z)) + RMSE(f, G(f, z)) ]

so its outputs look benign to the discriminator while staying close to the
malicious feature they came from. The discriminator minimizes

    -mean_ben[ log(1 - D(f)) ] - mean_gen[ log D(f) ]

(output 1 = generated/malicious). Candidates the trained discriminator
scores below 0.5 are kept as adversarial features.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..errors import EmptyResult, ShapeMismatch
from ..nn import DenseNet

_CLAMP = 1e-7
_RMSE_EPS = 1e-12

GEN_HIDDEN = (64, 64)
DISC_HIDDEN = (64, 32)
ADVERSARIAL_CUTOFF = 0.5


@dataclass
class GanConfig:
    noise_dim: int = 16
    epochs: int = 200
    batch: int = 32
    lr: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.noise_dim < 1:
            raise ValueError("noise_dim must be >= 1")


def build_networks(n_dims: int, config: GanConfig,
                   rng: np.random.Generator) -> Tuple[DenseNet, DenseNet]:
    gen = DenseNet([n_dims + config.noise_dim, *GEN_HIDDEN, n_dims],
                   hidden_activation="relu", output_activation="sigmoid", rng=rng)
    disc = DenseNet([n_dims, *DISC_HIDDEN, 1],
                    hidden_activation="relu", output_activation="sigmoid", rng=rng)
    return gen, disc


def rmse(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise root mean square error over the feature dimensions."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    return np.sqrt(np.mean((a - b) ** 2, axis=1))


def generator_forward(gen: DenseNet, feats: np.ndarray, noise: np.ndarray) -> np.ndarray:
    """G(f, z): concatenate features with noise and run the generator."""
    feats = np.atleast_2d(np.asarray(feats, dtype=float))
    noise = np.atleast_2d(np.asarray(noise, dtype=float))
    if feats.shape[0] != noise.shape[0]:
        raise ShapeMismatch("feature and noise batches differ in length")
    if feats.shape[1] + noise.shape[1] != gen.sizes[0]:
        raise ShapeMismatch(
            f"generator expects width {gen.sizes[0]}, "
            f"got {feats.shape[1]}+{noise.shape[1]}"
        )
    return gen.predict(np.hstack([feats, noise]))


def generator_loss(disc: DenseNet, feats: np.ndarray, generated: np.ndarray) -> float:
    """Batch mean of log D(G) + RMSE(f, G)."""
    scores = np.clip(disc.predict(generated)[:, 0], _CLAMP, 1.0 - _CLAMP)
    return float(np.mean(np.log(scores) + rmse(feats, generated)))


def discriminator_loss(disc: DenseNet, benign: np.ndarray, generated: np.ndarray) -> float:
    if len(benign) == 0 or len(generated) == 0:
        raise ValueError("both batches must be non-empty")
    d_ben = np.clip(disc.predict(benign)[:, 0], _CLAMP, 1.0 - _CLAMP)
    d_gen = np.clip(disc.predict(generated)[:, 0], _CLAMP, 1.0 - _CLAMP)
    return float(-np.mean(np.log(1.0 - d_ben)) - np.mean(np.log(d_gen)))


def _discriminator_step(disc: DenseNet, benign: np.ndarray, generated: np.ndarray,
                        lr: float) -> None:
    out_b, cache_b = disc.forward(benign)
    d_ben = np.clip(out_b, _CLAMP, 1.0 - _CLAMP)
    grads_b, _ = disc.backward(cache_b, (1.0 / (1.0 - d_ben)) / len(benign))
    out_g, cache_g = disc.forward(generated)
    d_gen = np.clip(out_g, _CLAMP, 1.0 - _CLAMP)
    grads_g, _ = disc.backward(cache_g, (-1.0 / d_gen) / len(generated))
    total = [(dwb + dwg, dbb + dbg)
             for (dwb, dbb), (dwg, dbg) in zip(grads_b, grads_g)]
    disc.sgd_step(total, lr)


def _generator_step(gen: DenseNet, disc: DenseNet, feats: np.ndarray,
                    noise: np.ndarray, lr: float) -> None:
    batch = len(feats)
    g_out, g_cache = gen.forward(np.hstack([feats, noise]))
    d_out, d_cache = disc.forward(g_out)
    d_clamped = np.clip(d_out, _CLAMP, 1.0 - _CLAMP)
    _, d_input_grad = disc.backward(d_cache, (1.0 / d_clamped) / batch)

    err = rmse(feats, g_out)[:, None]
    safe = np.where(err > _RMSE_EPS, err, 1.0)
    rmse_grad = np.where(err > _RMSE_EPS,
                         (g_out - feats) / (g_out.shape[1] * safe), 0.0) / batch

    grads, _ = gen.backward(g_cache, d_input_grad + rmse_grad)
    gen.sgd_step(grads, lr)


def train_gan(f_mal: np.ndarray, f_ben: np.ndarray, config: GanConfig
              ) -> Tuple[DenseNet, DenseNet, List[dict]]:
    """Alternating training: one discriminator step then one generator step
    per malicious batch. Returns (generator, discriminator, history) where
    history carries the full-set losses after each epoch."""
    f_mal = np.atleast_2d(np.asarray(f_mal, dtype=float))
    f_ben = np.atleast_2d(np.asarray(f_ben, dtype=float))
    if f_mal.size == 0 or f_ben.size == 0:
        raise ValueError("both feature sets must be non-empty")
    if f_mal.shape[1] != f_ben.shape[1]:
        raise ShapeMismatch("malicious and benign features differ in width")

    rng = np.random.default_rng(config.seed)
    gen, disc = build_networks(f_mal.shape[1], config, rng)

    history: List[dict] = []
    n_mal, n_ben = f_mal.shape[0], f_ben.shape[0]
    for epoch in range(config.epochs):
        order = rng.permutation(n_mal)
        ben_order = rng.permutation(n_ben)
        ben_pos = 0
        for start in range(0, n_mal, config.batch):
            idx = order[start:start + config.batch]
            feats = f_mal[idx]
            noise = rng.standard_normal((len(idx), config.noise_dim))
            generated = generator_forward(gen, feats, noise)

            take = []
            while len(take) < len(idx):
                if ben_pos == n_ben:
                    ben_order = rng.permutation(n_ben)
                    ben_pos = 0
                take.append(ben_order[ben_pos])
                ben_pos += 1
            _discriminator_step(disc, f_ben[np.asarray(take)], generated, config.lr)
            _generator_step(gen, disc, feats, noise, config.lr)

        eval_noise = rng.standard_normal((n_mal, config.noise_dim))
        eval_gen = generator_forward(gen, f_mal, eval_noise)
        history.append({
            "epoch": epoch,
            "generator_loss": generator_loss(disc, f_mal, eval_gen),
            "discriminator_loss": discriminator_loss(disc, f_ben, eval_gen),
        })
    return gen, disc, history


def generate_adversarial(gen: DenseNet, disc: DenseNet, f_mal: np.ndarray,
                         n_per: int, rng: np.random.Generator,
                         limit: Optional[int] = None,
                         allow_empty: bool = False) -> np.ndarray:
    """Draw n_per candidates per malicious feature and keep those the
    discriminator scores below 0.5 (classified benign), up to `limit`."""
    f_mal = np.atleast_2d(np.asarray(f_mal, dtype=float))
    if n_per == 0:
        if not allow_empty:
            raise ValueError("n_per=0 yields nothing; pass allow_empty=True if intended")
        return np.zeros((0, f_mal.shape[1]))

    kept = []
    noise_dim = gen.sizes[0] - f_mal.shape[1]
    for f in f_mal:
        tiled = np.tile(f, (n_per, 1))
        noise = rng.standard_normal((n_per, noise_dim))
        candidates = generator_forward(gen, tiled, noise)
        scores = disc.predict(candidates)[:, 0]
        kept.extend(candidates[scores < ADVERSARIAL_CUTOFF])
        if limit is not None and len(kept) >= limit:
            kept = kept[:limit]
            break
    if not kept:
        if allow_empty:
            return np.zeros((0, f_mal.shape[1]))
        raise EmptyResult(
            "no generated feature was scored benign; retrain the pair or relax the budget"
        )
    return np.asarray(kept)
