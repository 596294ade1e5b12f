"""A minimal decoder-only transformer with a KV cache for greedy decoding."""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F


@dataclass(frozen=True)
class ModelDims:
    d_model: int
    n_layers: int
    n_heads: int

    @property
    def d_ff(self) -> int:
        return 4 * self.d_model


PRESETS = {
    "toy": ModelDims(d_model=128, n_layers=4, n_heads=4),
    "mini": ModelDims(d_model=64, n_layers=2, n_heads=2),
}


class Block(nn.Module):
    def __init__(self, dims: ModelDims):
        super().__init__()
        self.n_heads = dims.n_heads
        self.ln1 = nn.LayerNorm(dims.d_model)
        self.attn = nn.Linear(dims.d_model, 3 * dims.d_model)
        self.proj = nn.Linear(dims.d_model, dims.d_model)
        self.ln2 = nn.LayerNorm(dims.d_model)
        self.mlp = nn.Sequential(
            nn.Linear(dims.d_model, dims.d_ff),
            nn.GELU(),
            nn.Linear(dims.d_ff, dims.d_model),
        )

    def _split(self, x: torch.Tensor) -> torch.Tensor:
        b, t, d = x.shape
        return x.view(b, t, self.n_heads, d // self.n_heads).transpose(1, 2)

    def forward(self, x, cache=None, use_causal_mask=True):
        """cache, when given, is a dict holding past k/v; new keys are
        appended and attention runs over the full past."""
        q, k, v = self.attn(self.ln1(x)).chunk(3, dim=-1)
        q, k, v = self._split(q), self._split(k), self._split(v)
        if cache is not None:
            if "k" in cache:
                k = torch.cat([cache["k"], k], dim=2)
                v = torch.cat([cache["v"], v], dim=2)
            cache["k"], cache["v"] = k, v
        causal = use_causal_mask and q.size(2) > 1
        y = F.scaled_dot_product_attention(q, k, v, is_causal=causal)
        b, h, t, dh = y.shape
        y = y.transpose(1, 2).reshape(b, t, h * dh)
        x = x + self.proj(y)
        return x + self.mlp(self.ln2(x))


class TraceModel(nn.Module):
    def __init__(self, vocab_size: int, context_length: int, dims: ModelDims):
        super().__init__()
        self.context_length = context_length
        self.tok_emb = nn.Embedding(vocab_size, dims.d_model)
        self.pos_emb = nn.Embedding(context_length, dims.d_model)
        self.blocks = nn.ModuleList(Block(dims) for _ in range(dims.n_layers))
        self.ln_f = nn.LayerNorm(dims.d_model)
        self.head = nn.Linear(dims.d_model, vocab_size, bias=False)

    def param_count(self) -> int:
        return sum(p.numel() for p in self.parameters())

    def forward(self, ids: torch.Tensor, caches=None, position_offset: int = 0):
        """ids: (B, T). With caches (list of dicts, one per block) the input
        is treated as a continuation starting at position_offset."""
        b, t = ids.shape
        positions = torch.arange(position_offset, position_offset + t, device=ids.device)
        x = self.tok_emb(ids) + self.pos_emb(positions)[None, :, :]
        for i, block in enumerate(self.blocks):
            cache = caches[i] if caches is not None else None
            x = block(x, cache=cache)
        return self.head(self.ln_f(x))

    @torch.no_grad()
    def greedy_continuations(
        self, prompts: torch.Tensor, max_new_tokens: int, eos_id: int, pad_id: int
    ) -> list[list[int]]:
        """Greedy-decode a batch of equal-length prompts; returns the token
        ids generated after each prompt. Generation stops after emitting eos
        (which is kept: the grammar needs it) or when the budget or context
        runs out (a truncated response, left to fail parsing downstream).
        Finished rows are fed pad, which only they attend to."""
        self.eval()
        b, prompt_len = prompts.shape
        out: list[list[int]] = [[] for _ in range(b)]
        if max_new_tokens < 1:
            return out
        caches = [dict() for _ in self.blocks]
        logits = self.forward(prompts, caches=caches, position_offset=0)
        next_ids = logits[:, -1, :].argmax(dim=-1)
        done = torch.zeros(b, dtype=torch.bool)
        for row in range(b):
            out[row].append(int(next_ids[row]))
        done |= next_ids == eos_id
        budget = min(max_new_tokens, self.context_length - prompt_len)
        for step in range(1, budget):
            if bool(done.all()):
                break
            feed = torch.where(done, torch.full_like(next_ids, pad_id), next_ids)
            logits = self.forward(
                feed[:, None], caches=caches, position_offset=prompt_len + step - 1
            )
            next_ids = logits[:, -1, :].argmax(dim=-1)
            for row in range(b):
                if not done[row]:
                    out[row].append(int(next_ids[row]))
            done |= next_ids == eos_id
        return out


def build_model(vocab_size: int, context_length: int, preset: str) -> TraceModel:
    if preset not in PRESETS:
        raise ValueError(f"unknown model preset {preset!r}; pick one of {sorted(PRESETS)}")
    return TraceModel(vocab_size, context_length, PRESETS[preset])
