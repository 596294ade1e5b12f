"""Token vocabulary for training: built by scanning token text files.

The trainer deliberately avoids importing the dataset library; everything it
knows about tokens comes from the published text format (space-separated
tokens, one sample per line). ``pad`` is always id 0 so batching code can
rely on it.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Union

PAD = "pad"
BOS = "bos"
EOS = "eos"
SPECIALS = (PAD, BOS, EOS)


class VocabError(ValueError):
    pass


class Vocab:
    def __init__(self, tokens: Iterable[str]):
        tokens = list(tokens)
        if len(tokens) != len(set(tokens)):
            raise VocabError("duplicate tokens in vocabulary")
        self.tokens = tokens
        self.index = {tok: i for i, tok in enumerate(tokens)}
        for special in SPECIALS:
            if special not in self.index:
                raise VocabError(f"vocabulary is missing the {special!r} token")
        if self.index[PAD] != 0:
            raise VocabError("pad must be token id 0")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def pad_id(self) -> int:
        return 0

    @property
    def eos_id(self) -> int:
        return self.index[EOS]

    def encode(self, tokens: Iterable[str], *, lineno: int | None = None) -> list[int]:
        ids = []
        for tok in tokens:
            tid = self.index.get(tok)
            if tid is None:
                where = f" on line {lineno}" if lineno is not None else ""
                raise VocabError(f"out-of-vocabulary token {tok!r}{where}")
            ids.append(tid)
        return ids

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.tokens[i] for i in ids]

    @classmethod
    def build(cls, text_paths: Iterable[Union[str, Path]]) -> "Vocab":
        """Scan token text files; pad first, the rest sorted for stability."""
        seen: set[str] = set()
        for path in text_paths:
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    seen.update(line.split())
        seen.update(SPECIALS)
        seen.discard(PAD)
        return cls([PAD] + sorted(seen))

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text("\n".join(self.tokens) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Vocab":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls([line for line in lines if line])
