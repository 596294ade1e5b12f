"""Teacher-forced next-token training over full token lines.

Optimizer defaults: AdamW with betas (0.9, 0.999), weight decay 0.1528,
peak learning rate 2.2758e-4 and 100 linear warm-up steps, constant after
warm-up. Runs are deterministic per seed on a fixed machine. The training
text's sidecar manifest (written by the dataset tool's emit step) supplies
the grammar version and prompt mode, both stored into the checkpoint so
decoding can check compatibility and build matching prompts.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Union

import torch
import torch.nn.functional as F

from .model import build_model
from .vocab import Vocab, VocabError


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    vocab_path: str
    text_path: str
    out_path: str
    steps: int = 2000
    batch_size: int = 8
    context_length: int = 1024
    seed: int = 0
    preset: str = "toy"
    beta1: float = 0.9
    beta2: float = 0.999
    weight_decay: float = 0.1528
    peak_lr: float = 2.2758e-4
    warmup_steps: int = 100
    log_every: int = 50


def load_lines(text_path: Union[str, Path], vocab: Vocab) -> list[list[int]]:
    """Token lines as id lists; out-of-vocabulary tokens are fatal and
    reported with their line number."""
    lines = []
    with open(text_path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            tokens = raw.split()
            if not tokens:
                continue
            try:
                lines.append(vocab.encode(tokens, lineno=lineno))
            except VocabError as exc:
                raise TrainingError(f"{text_path}: {exc}") from exc
    if not lines:
        raise TrainingError(f"{text_path}: no training lines")
    return lines


def read_text_manifest(text_path: Union[str, Path]) -> dict:
    manifest = Path(f"{text_path}.manifest.json")
    if not manifest.exists():
        raise TrainingError(
            f"missing {manifest}; emit the training text with its manifest"
        )
    return json.loads(manifest.read_text(encoding="utf-8"))


def _lr_at(step: int, cfg: TrainConfig) -> float:
    if step < cfg.warmup_steps:
        return cfg.peak_lr * (step + 1) / cfg.warmup_steps
    return cfg.peak_lr


def _batchify(
    lines: list[list[int]], picks: torch.Tensor, pad_id: int
) -> tuple[torch.Tensor, torch.Tensor]:
    chosen = [lines[int(i)] for i in picks]
    width = max(len(line) for line in chosen)
    batch = torch.full((len(chosen), width), pad_id, dtype=torch.long)
    for row, line in enumerate(chosen):
        batch[row, : len(line)] = torch.tensor(line, dtype=torch.long)
    # Inputs are all but the last position; targets all but the first.
    return batch[:, :-1], batch[:, 1:]


def train(cfg: TrainConfig) -> Path:
    """Train a model on a token text file and write a checkpoint.

    Returns the checkpoint path. A loss-curve log is written next to it.
    """
    if cfg.steps >= 50_000:
        print(
            f"note: {cfg.steps} steps is beyond desk scale for this toy "
            "harness; expect a long run",
            file=sys.stderr,
        )
    torch.manual_seed(cfg.seed)
    vocab = Vocab.load(cfg.vocab_path)
    lines = load_lines(cfg.text_path, vocab)
    longest = max(len(line) for line in lines)
    if longest > cfg.context_length:
        raise TrainingError(
            f"context length {cfg.context_length} is shorter than the longest "
            f"training line ({longest} tokens)"
        )
    text_manifest = read_text_manifest(cfg.text_path)

    model = build_model(len(vocab), cfg.context_length, cfg.preset)
    optimizer = torch.optim.AdamW(
        model.parameters(),
        lr=cfg.peak_lr,
        betas=(cfg.beta1, cfg.beta2),
        weight_decay=cfg.weight_decay,
    )
    sampler = torch.Generator().manual_seed(cfg.seed)

    model.train()
    loss_log: list[tuple[int, float]] = []
    final_loss = math.inf
    for step in range(cfg.steps):
        picks = torch.randint(0, len(lines), (cfg.batch_size,), generator=sampler)
        inputs, targets = _batchify(lines, picks, vocab.pad_id)
        logits = model(inputs)
        loss = F.cross_entropy(
            logits.reshape(-1, logits.size(-1)),
            targets.reshape(-1),
            ignore_index=vocab.pad_id,
        )
        for group in optimizer.param_groups:
            group["lr"] = _lr_at(step, cfg)
        optimizer.zero_grad(set_to_none=True)
        loss.backward()
        optimizer.step()
        final_loss = loss.item()
        if step % cfg.log_every == 0 or step == cfg.steps - 1:
            loss_log.append((step, final_loss))

    out_path = Path(cfg.out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "model_state": model.state_dict(),
            "config": asdict(cfg),
            "vocab_tokens": vocab.tokens,
            "grammar_version": text_manifest.get("grammar_version"),
            "mode": text_manifest.get("mode"),
            "domain": text_manifest.get("domain"),
            "final_loss": final_loss,
        },
        out_path,
    )
    log_path = Path(f"{out_path}.loss.json")
    log_path.write_text(
        json.dumps({"loss": loss_log, "final_loss": final_loss}, indent=2) + "\n",
        encoding="utf-8",
    )
    return out_path
