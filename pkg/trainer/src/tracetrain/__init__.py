"""Toy decoder-only sequence models for tracelab token datasets."""

from .decode import DecodeConfig, decode, load_checkpoint, prompt_tokens
from .model import PRESETS, TraceModel, build_model
from .train import TrainConfig, TrainingError, load_lines, train
from .vocab import Vocab, VocabError

__version__ = "0.1.0"
