"""Training objective in 8-bit pixel units: MSE plus the quartic
band-penalty term (zero inside [x - tau, x + tau], steep outside)."""

import torch


def l2_term(pred, target):
    d = pred - target
    return (d * d).mean()


def quasi_linf_term(pred, target, tau):
    d = pred - target
    t = tau.view(-1, 1, 1, 1).to(pred.dtype)
    return torch.clamp(d**4 - t**4, min=0.0).mean()


def joint_loss(pred, target, tau, lam=0.2):
    """l2 + lam * quasi-linf, both in pixel units; tau is per-sample."""
    return l2_term(pred, target) + lam * quasi_linf_term(pred, target, tau)
