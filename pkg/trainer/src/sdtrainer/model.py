"""Torch mirror of the codec's soft-decoding network.

Layer geometry, padding, upsampling, the tau conditioning channel, the
global skip, and the final band truncation replicate the inference
runtime exactly, so exported weights evaluate the same on both sides.
The band truncation participates in training with a straight-through
mask: gradients pass only where the raw output already lay inside
[y - tau, y + tau] (band edges included).
"""

import torch
from torch import nn


class BandTruncation(torch.autograd.Function):
    @staticmethod
    def forward(ctx, x, lo, hi):
        ctx.save_for_backward((x >= lo) & (x <= hi))
        return torch.clamp(x, lo, hi)

    @staticmethod
    def backward(ctx, grad):
        (inside,) = ctx.saved_tensors
        return grad * inside, None, None


def band_truncate(x, y, tau):
    """Clamp x into [y - tau, y + tau] with the straight-through gradient."""
    return BandTruncation.apply(x, y - tau, y + tau)


class DilatedBlock(nn.Module):
    def __init__(self, channels, dilation):
        super().__init__()
        self.conv1 = nn.Conv2d(channels, channels, 3, padding=dilation, dilation=dilation)
        self.conv2 = nn.Conv2d(channels, channels, 3, padding=dilation, dilation=dilation)

    def forward(self, x):
        return x + self.conv2(torch.relu(self.conv1(x)))


class SDNet(nn.Module):
    """Head conv, stride-2 residual block, dilated residual blocks, 2x
    upsampling residual block, tail conv, global skip over the input."""

    def __init__(self, num_blocks=8, base_channels=64, dilation=2):
        super().__init__()
        c = base_channels
        self.num_blocks = num_blocks
        self.base_channels = base_channels
        self.dilation = dilation
        self.head = nn.Conv2d(2, c, 3, padding=1)
        self.down_conv1 = nn.Conv2d(c, c, 3, stride=2, padding=1)
        self.down_conv2 = nn.Conv2d(c, c, 3, padding=1)
        self.down_skip = nn.Conv2d(c, c, 1, stride=2)
        self.blocks = nn.ModuleList(DilatedBlock(c, dilation) for _ in range(num_blocks))
        self.up_conv1 = nn.Conv2d(c, c, 3, padding=1)
        self.up_conv2 = nn.Conv2d(c, c, 3, padding=1)
        self.tail = nn.Conv2d(c, 1, 3, padding=1)

    def forward_raw(self, y, tau):
        """Pre-truncation output in pixel units.

        y: [B, 1, H, W] float in 0..255 (even H, W); tau: [B] float.

        The tail predicts the correction directly in pixel units; the
        inference runtime multiplies its tail output by 255, so the
        exporter divides the tail parameters by 255 to compensate.
        Training with the runtime's scaling would put the tail in a
        valley ~65000x steeper than every other layer and stall Adam.
        """
        t = tau.view(-1, 1, 1, 1).to(y.dtype)
        x = torch.cat([y / 255.0, (t / 8.0).expand_as(y)], dim=1)
        x = torch.relu(self.head(x))
        x = self.down_conv2(torch.relu(self.down_conv1(x))) + self.down_skip(x)
        for block in self.blocks:
            x = block(x)
        u = torch.repeat_interleave(torch.repeat_interleave(x, 2, dim=2), 2, dim=3)
        x = u + self.up_conv2(torch.relu(self.up_conv1(u)))
        return y + self.tail(x)

    def forward(self, y, tau):
        """Band-truncated restoration; used in training and inference."""
        t = tau.view(-1, 1, 1, 1).to(y.dtype)
        return band_truncate(self.forward_raw(y, tau), y, t)


def restore_to_uint8(model, y_patch, tau):
    """Mirror the runtime's integer pipeline: truncate, round half away
    from zero, re-clamp into the band, clamp to 0..255."""
    import numpy as np

    model.eval()
    with torch.no_grad():
        y = torch.from_numpy(y_patch.astype("float32"))[None, None]
        out = model(y, torch.tensor([float(tau)]))[0, 0].numpy().astype(np.float64)
    r = np.sign(out) * np.floor(np.abs(out) + 0.5)
    yf = y_patch.astype(np.float64)
    r = np.clip(r, yf - tau, yf + tau)
    return np.clip(r, 0, 255).astype(np.uint8)
