"""Frozen transformer encoder with locally generated weights.

Model names resolve to configurations whose weights are derived
deterministically from the name via counter-based RNG, so nothing is ever
downloaded and a rerun reproduces the same bytes. The architecture is the
standard post-norm encoder stack: token + position + segment embeddings,
multi-head self-attention, GELU feed-forward.

All math is float32. On one machine with a fixed BLAS the forward pass is
bit-reproducible; the extraction summary records that guarantee.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

import numpy as np

VOCAB_SIZE = 8192
MAX_POSITIONS = 512
PAD_ID, CLS_ID, SEP_ID = 0, 1, 2
_RESERVED = 3

_WORD = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class EncoderConfig:
    name: str
    dim: int
    n_layers: int
    n_heads: int
    ffn_dim: int


_MODELS = {
    "toy-768": EncoderConfig("toy-768", 768, 2, 12, 1536),
    "toy-64": EncoderConfig("toy-64", 64, 2, 4, 128),
}


def available_models() -> list[str]:
    return sorted(_MODELS)


class UnknownModelError(ValueError):
    pass


def _resolve(name: str) -> EncoderConfig:
    if name not in _MODELS:
        raise UnknownModelError(
            f"unknown encoder '{name}'; available: {', '.join(available_models())}. "
            "Encoders are generated locally from name-seeded weights; there "
            "is nothing to download.")
    return _MODELS[name]


def tokenize(text: str) -> list[int]:
    """Lowercased word pieces hashed into a fixed vocabulary."""
    ids = []
    for word in _WORD.findall(text.lower()):
        h = hashlib.sha256(word.encode("utf-8")).digest()
        ids.append(_RESERVED + int.from_bytes(h[:4], "little")
                   % (VOCAB_SIZE - _RESERVED))
    return ids


def encode_pair(text_a: str, text_b: str, max_length: int):
    """[CLS] A [SEP] B [SEP] with segment ids, truncating the longer side
    first when the pair overflows max_length. Returns (ids, segments,
    truncated flag)."""
    a = tokenize(text_a)
    b = tokenize(text_b)
    budget = max_length - 3
    if budget < 2:
        raise ValueError("max_length leaves no room for the text")
    truncated = len(a) + len(b) > budget
    while len(a) + len(b) > budget:
        if len(a) >= len(b):
            a.pop()
        else:
            b.pop()
    ids = [CLS_ID] + a + [SEP_ID] + b + [SEP_ID]
    segments = [0] * (len(a) + 2) + [1] * (len(b) + 1)
    return ids, segments, truncated


def _gelu(x):
    c = np.float32(np.sqrt(2.0 / np.pi))
    return 0.5 * x * (1.0 + np.tanh(c * (x + np.float32(0.044715) * x ** 3)))


def _layer_norm(x, eps=1e-5):
    mean = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    return ((x - mean) / np.sqrt(var + np.float32(eps))).astype(np.float32)


class FrozenEncoder:
    """Inference-only encoder; weights fixed at construction."""

    def __init__(self, name: str):
        self.config = _resolve(name)
        key = int.from_bytes(
            hashlib.sha256(self.config.name.encode("utf-8")).digest()[:8],
            "little")
        self._counter = 0
        self._key = key
        cfg = self.config
        self.tok_emb = self._tensor((VOCAB_SIZE, cfg.dim))
        self.pos_emb = self._tensor((MAX_POSITIONS, cfg.dim))
        self.seg_emb = self._tensor((2, cfg.dim))
        self.layers = []
        for _ in range(cfg.n_layers):
            self.layers.append({
                "wq": self._tensor((cfg.dim, cfg.dim)),
                "wk": self._tensor((cfg.dim, cfg.dim)),
                "wv": self._tensor((cfg.dim, cfg.dim)),
                "wo": self._tensor((cfg.dim, cfg.dim)),
                "w1": self._tensor((cfg.dim, cfg.ffn_dim)),
                "b1": self._tensor((cfg.ffn_dim,)),
                "w2": self._tensor((cfg.ffn_dim, cfg.dim)),
                "b2": self._tensor((cfg.dim,)),
            })

    def _tensor(self, shape, scale=0.02):
        rng = np.random.Generator(np.random.Philox([self._key, self._counter]))
        self._counter += 1
        return (scale * rng.standard_normal(shape)).astype(np.float32)

    def _attention(self, x, layer):
        cfg = self.config
        n, h = x.shape[0], cfg.n_heads
        head = cfg.dim // h
        q = (x @ layer["wq"]).reshape(n, h, head).transpose(1, 0, 2)
        k = (x @ layer["wk"]).reshape(n, h, head).transpose(1, 0, 2)
        v = (x @ layer["wv"]).reshape(n, h, head).transpose(1, 0, 2)
        scores = q @ k.transpose(0, 2, 1) / np.float32(np.sqrt(head))
        scores -= scores.max(axis=-1, keepdims=True)
        weights = np.exp(scores)
        weights /= weights.sum(axis=-1, keepdims=True)
        mixed = (weights @ v).transpose(1, 0, 2).reshape(n, cfg.dim)
        return (mixed @ layer["wo"]).astype(np.float32)

    def encode(self, text_a: str, text_b: str, max_length: int = 128):
        """Final-layer hidden state of the first token, plus the
        truncation flag. No pooler transformation is applied."""
        ids, segments, truncated = encode_pair(text_a, text_b, max_length)
        x = (self.tok_emb[ids] + self.pos_emb[: len(ids)]
             + self.seg_emb[segments])
        x = _layer_norm(x)
        for layer in self.layers:
            x = _layer_norm(x + self._attention(x, layer))
            ff = _gelu(x @ layer["w1"] + layer["b1"]) @ layer["w2"] + layer["b2"]
            x = _layer_norm(x + ff.astype(np.float32))
        return x[0], truncated
