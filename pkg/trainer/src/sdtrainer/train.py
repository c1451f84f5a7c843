"""Seeded training loop: Adam with the two-stage learning-rate schedule,
band truncation active in the graph, divergence detection."""

import math
from dataclasses import dataclass

import numpy as np
import torch

from .losses import joint_loss
from .model import SDNet


class TrainingDiverged(RuntimeError):
    """Loss or parameters became non-finite."""


@dataclass
class TrainResult:
    model: SDNet
    history: list  # per-step joint loss values


def _to_tensors(pairs):
    x = torch.from_numpy(np.stack([p.x_patch for p in pairs]).astype("float32"))[:, None]
    y = torch.from_numpy(np.stack([p.y_patch for p in pairs]).astype("float32"))[:, None]
    tau = torch.tensor([float(p.tau) for p in pairs])
    return x, y, tau


def train(pairs, cfg, log=None) -> TrainResult:
    """Optimize the joint loss over the pairs; reproducible for a fixed
    cfg.seed (same machine, same thread count)."""
    if not pairs:
        raise ValueError("empty dataset")
    torch.manual_seed(cfg.seed)
    model = SDNet(cfg.num_blocks, cfg.base_channels, cfg.dilation)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr_main, betas=(cfg.beta1, cfg.beta2))
    x_all, y_all, tau_all = _to_tensors(pairs)
    n = len(pairs)
    gen = torch.Generator().manual_seed(cfg.seed)
    history = []
    step = 0
    model.train()
    for epoch in range(cfg.epochs_main + cfg.epochs_tail):
        if epoch == cfg.epochs_main:
            for group in opt.param_groups:
                group["lr"] = cfg.lr_tail
        order = torch.randperm(n, generator=gen)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            pred = model(y_all[idx], tau_all[idx])
            loss = joint_loss(pred, x_all[idx], tau_all[idx], cfg.lam)
            opt.zero_grad()
            loss.backward()
            if cfg.grad_clip > 0:
                # the quartic band penalty has cliff-like gradients; an
                # unclipped step can throw raw outputs past the band,
                # where the truncation mask kills their gradients
                torch.nn.utils.clip_grad_norm_(model.parameters(), cfg.grad_clip)
            opt.step()
            value = float(loss.detach())
            if not math.isfinite(value):
                raise TrainingDiverged(f"non-finite loss {value} at step {step}")
            history.append(value)
            step += 1
        if log is not None:
            recent = history[-max(1, n // cfg.batch_size):]
            log(f"epoch {epoch + 1}/{cfg.epochs_main + cfg.epochs_tail} "
                f"loss {float(np.mean(recent)):.4f}")
    for p in model.parameters():
        if not torch.isfinite(p).all():
            raise TrainingDiverged("non-finite parameters after training")
    return TrainResult(model, history)


def patch_psnr(a: np.ndarray, b: np.ndarray) -> float:
    mse = float(np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2))
    return math.inf if mse == 0 else 10.0 * math.log10(255.0**2 / mse)


def mean_soft_psnr(model, pairs) -> float:
    """Mean PSNR of the model's integer restorations against the clean patches."""
    from .model import restore_to_uint8

    return float(np.mean([
        patch_psnr(restore_to_uint8(model, p.y_patch, p.tau), p.x_patch) for p in pairs
    ]))


def mean_hard_psnr(pairs) -> float:
    """Mean PSNR of the hard-decoded patches themselves (the baseline)."""
    return float(np.mean([patch_psnr(p.y_patch, p.x_patch) for p in pairs]))
