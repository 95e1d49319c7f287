"""Recurrent Gaussian policy / value network and checkpoint IO.

Architecture: FC encoder -> GRU cell -> linear policy head with a
state-independent log-std vector, plus a linear value head off the same
recurrent features.
"""
from __future__ import annotations

import math
from typing import Optional, Tuple

import torch
from torch import nn

CHECKPOINT_FORMAT_VERSION = 1
LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0


class CheckpointError(RuntimeError):
    pass


class RecurrentPolicy(nn.Module):
    def __init__(self, obs_dim: int = 19, action_dim: int = 6,
                 encoder_dims: Tuple[int, ...] = (128, 128), rnn_hidden: int = 128):
        super().__init__()
        self.obs_dim = obs_dim
        self.action_dim = action_dim
        self.encoder_dims = tuple(encoder_dims)
        self.rnn_hidden = rnn_hidden
        layers = []
        last = obs_dim
        for d in encoder_dims:
            layers += [nn.Linear(last, d), nn.ReLU()]
            last = d
        self.encoder = nn.Sequential(*layers)
        self.gru = nn.GRUCell(last, rnn_hidden)
        self.policy_head = nn.Linear(rnn_hidden, action_dim)
        self.value_head = nn.Linear(rnn_hidden, 1)
        self.log_std = nn.Parameter(torch.zeros(action_dim))
        with torch.no_grad():
            self.policy_head.weight.mul_(0.01)
            self.policy_head.bias.zero_()

    def initial_state(self, batch: int, *, dtype=None, device=None) -> torch.Tensor:
        p = next(self.parameters())
        return torch.zeros(batch, self.rnn_hidden, dtype=dtype or p.dtype,
                           device=device or p.device)

    def forward(self, obs: torch.Tensor, hidden: torch.Tensor):
        """Single recurrent step; returns (mean, log_std, value, hidden')."""
        if obs.shape[-1] != self.obs_dim:
            raise ValueError(f"observation dim {obs.shape[-1]} != {self.obs_dim}")
        x = self.encoder(obs)
        h = self.gru(x, hidden)
        mean = self.policy_head(h)
        value = self.value_head(h).squeeze(-1)
        log_std = self.log_std.clamp(LOG_STD_MIN, LOG_STD_MAX)
        return mean, log_std, value, h

    def arch_descriptor(self) -> dict:
        return {
            "net": "fc_gru_gaussian",
            "obs_dim": self.obs_dim,
            "action_dim": self.action_dim,
            "encoder_dims": list(self.encoder_dims),
            "rnn_hidden": self.rnn_hidden,
        }


def gaussian_log_prob(mean: torch.Tensor, log_std: torch.Tensor,
                      actions: torch.Tensor) -> torch.Tensor:
    var = torch.exp(2.0 * log_std)
    return (-0.5 * (actions - mean) ** 2 / var - log_std
            - 0.5 * math.log(2.0 * math.pi)).sum(-1)


def gaussian_entropy(log_std: torch.Tensor) -> torch.Tensor:
    return (log_std + 0.5 * math.log(2.0 * math.pi * math.e)).sum()


def sample_action(mean: torch.Tensor, log_std: torch.Tensor,
                  generator: torch.Generator) -> Tuple[torch.Tensor, torch.Tensor]:
    """Diagonal Gaussian sample and its exact (pre-clamp) log-probability."""
    noise = torch.randn(mean.shape, generator=generator, dtype=mean.dtype,
                        device=mean.device)
    actions = mean + noise * torch.exp(log_std)
    return actions, gaussian_log_prob(mean, log_std, actions)


def save_checkpoint(path, net: RecurrentPolicy, controller_kind: str,
                    train_steps: int = 0, extra: Optional[dict] = None) -> None:
    payload = {
        "checkpoint_format_version": CHECKPOINT_FORMAT_VERSION,
        "controller_kind": controller_kind,
        "arch": net.arch_descriptor(),
        "train_steps": int(train_steps),
        "state_dict": net.state_dict(),
        "extra": extra or {},
    }
    torch.save(payload, path)


def load_checkpoint(path, expected_kind: Optional[str] = None):
    """Rebuild the network from its embedded descriptor; refuses unknown
    formats, architectures, and mismatched controller kinds."""
    try:
        payload = torch.load(path, map_location="cpu", weights_only=False)
    except Exception as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    ver = payload.get("checkpoint_format_version")
    if ver != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint format version {ver!r}")
    arch = payload.get("arch", {})
    if arch.get("net") != "fc_gru_gaussian":
        raise CheckpointError(f"unknown architecture descriptor {arch!r}")
    if expected_kind is not None and payload.get("controller_kind") != expected_kind:
        raise CheckpointError(
            f"checkpoint is for controller {payload.get('controller_kind')!r}, "
            f"expected {expected_kind!r}")
    net = RecurrentPolicy(obs_dim=arch["obs_dim"], action_dim=arch["action_dim"],
                          encoder_dims=tuple(arch["encoder_dims"]),
                          rnn_hidden=arch["rnn_hidden"])
    net.load_state_dict(payload["state_dict"])
    net.eval()
    meta = {k: payload[k] for k in ("controller_kind", "train_steps", "extra")}
    return net, meta
