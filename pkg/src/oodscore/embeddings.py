"""Unit-norm embedding vectors, similarity logits, and the OCEB store format.

OCEB v1 binary layout (little-endian, fixed):

    magic   4 bytes  b"OCEB"
    version u32      1
    dim     u32      vector dimension (>= 1)
    count   u64      number of records
    payload count * dim * float32, row-major

A sidecar NDJSON file sits next to the binary with the same stem and the
extension ``.meta.jsonl``. Its first line is a manifest object
``{"_manifest": {"normalized": true|false}}``; each following line describes
one record, in payload order:
``{"id": str, "class": str, "split": str|null, "extra": {...}}``.

Vectors are stored as float32 and widened to float64 for all arithmetic.
Stores are immutable after construction; every function here is pure.
"""

import json
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from . import serialize
from .errors import (
    BadMagic,
    DimensionMismatch,
    DuplicateId,
    NonFinite,
    TruncatedPayload,
    VersionUnsupported,
    ZeroNorm,
)

MAGIC = b"OCEB"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIQ")

# Norm agreement required to accept a stored vector as already unit-length.
NORM_TOLERANCE = 1e-4


def normalize(values) -> np.ndarray:
    """Scale a raw vector to unit L2 norm (float64).

    Raises NonFinite for NaN/Inf components and ZeroNorm when the norm is
    at or below 1e-12. Direction is preserved exactly; scaling the input by
    a power of two leaves the result bit-identical.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ZeroNorm("expected a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("vector contains NaN or Inf")
    norm = float(np.linalg.norm(arr))
    if norm <= 1e-12:
        raise ZeroNorm(f"vector norm {norm:g} too small to normalize")
    return arr / norm


@dataclass(frozen=True)
class LogitRow:
    """Similarities of one image against an ordered list of classes."""

    values: np.ndarray
    class_order: tuple[str, ...]

    def __post_init__(self):
        if len(self.values) != len(self.class_order):
            raise DimensionMismatch(
                f"{len(self.values)} logits for {len(self.class_order)} classes"
            )
        if not np.all(np.isfinite(self.values)):
            raise NonFinite("logits contain NaN or Inf")


def logits(img: np.ndarray, class_matrix: np.ndarray, class_order) -> LogitRow:
    """Dot products of an image embedding against stacked class embeddings.

    For unit vectors these are cosine similarities in [-1, 1].
    """
    img = np.asarray(img, dtype=np.float64)
    class_matrix = np.asarray(class_matrix, dtype=np.float64)
    if class_matrix.ndim != 2 or class_matrix.shape[1] != img.shape[0]:
        raise DimensionMismatch(
            f"image has dim {img.shape[0]}, classes have shape {class_matrix.shape}"
        )
    values = class_matrix @ img
    return LogitRow(values=values, class_order=tuple(class_order))


@dataclass(frozen=True)
class EmbeddingStore:
    """Immutable ordered collection of (id, vector, metadata) records.

    ``vectors`` is a float32 matrix of shape (count, dim); ``meta`` holds one
    dict per record with keys "class", "split", and "extra". ``renormalized``
    records whether any vector had to be rescaled at load time.
    """

    dim: int
    ids: tuple[str, ...]
    vectors: np.ndarray
    meta: tuple[dict, ...] = field(default=())
    normalized: bool = True
    renormalized: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionMismatch("store dim must be >= 1")
        if self.vectors.shape != (len(self.ids), self.dim):
            raise DimensionMismatch(
                f"vector matrix {self.vectors.shape} does not match "
                f"{len(self.ids)} ids x dim {self.dim}"
            )
        if len(set(self.ids)) != len(self.ids):
            seen, dup = set(), None
            for rid in self.ids:
                if rid in seen:
                    dup = rid
                    break
                seen.add(rid)
            raise DuplicateId(f"duplicate record id {dup!r}")
        if not self.meta:
            object.__setattr__(self, "meta", tuple({} for _ in self.ids))
        elif len(self.meta) != len(self.ids):
            raise TruncatedPayload(
                f"{len(self.meta)} metadata records for {len(self.ids)} vectors"
            )

    def __len__(self) -> int:
        return len(self.ids)

    def vector(self, record_id: str) -> np.ndarray:
        """Widened float64 vector for one record id."""
        return self.lookup()[record_id]

    def lookup(self) -> dict[str, np.ndarray]:
        """id -> float64 vector map (built once, cached on the instance)."""
        cache = getattr(self, "_lookup_cache", None)
        if cache is None:
            wide = self.vectors.astype(np.float64)
            cache = {rid: wide[i] for i, rid in enumerate(self.ids)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache


def make_store(dim: int, records, normalized: bool = True) -> EmbeddingStore:
    """Build a store from (id, vector, meta) triples, casting to float32."""
    ids, rows, metas = [], [], []
    for rid, vec, meta in records:
        arr = np.asarray(vec, dtype=np.float64)
        if arr.shape != (dim,):
            raise DimensionMismatch(f"record {rid!r} has shape {arr.shape}, want ({dim},)")
        if not np.all(np.isfinite(arr)):
            raise NonFinite(f"record {rid!r} contains NaN or Inf")
        ids.append(rid)
        rows.append(arr.astype(np.float32))
        metas.append(dict(meta))
    matrix = np.vstack(rows) if rows else np.zeros((0, dim), dtype=np.float32)
    return EmbeddingStore(
        dim=dim, ids=tuple(ids), vectors=matrix, meta=tuple(metas),
        normalized=normalized,
    )


def sidecar_path(path) -> str:
    return os.path.splitext(os.fspath(path))[0] + ".meta.jsonl"


def save_store(store: EmbeddingStore, path) -> None:
    """Write the binary payload and its metadata sidecar."""
    path = os.fspath(path)
    payload = np.ascontiguousarray(store.vectors, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, store.dim, len(store)))
        fh.write(payload)
    lines = [{"_manifest": {"normalized": bool(store.normalized)}}]
    for rid, meta in zip(store.ids, store.meta):
        lines.append({
            "id": rid,
            "class": str(meta.get("class", "")),
            "split": meta.get("split"),
            "extra": meta.get("extra", {}),
        })
    serialize.dump_ndjson(lines, sidecar_path(path))


def load_store(path) -> EmbeddingStore:
    """Read an OCEB file and its sidecar.

    Vectors whose norm strays more than NORM_TOLERANCE from 1.0 — and every
    vector when the manifest says ``normalized: false`` — are renormalized
    and the store is flagged ``renormalized=True``; stored bits are otherwise
    preserved exactly.
    """
    path = os.fspath(path)
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise TruncatedPayload(f"{path}: header incomplete ({len(header)} bytes)")
        magic, version, dim, count = _HEADER.unpack(header)
        if magic != MAGIC:
            raise BadMagic(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise VersionUnsupported(f"{path}: version {version} unsupported")
        if dim < 1:
            raise TruncatedPayload(f"{path}: dim {dim} invalid")
        expected = count * dim * 4
        payload = fh.read(expected + 1)
        if len(payload) < expected:
            raise TruncatedPayload(
                f"{path}: payload has {len(payload)} bytes, header promises {expected}"
            )
        if len(payload) > expected:
            raise TruncatedPayload(f"{path}: trailing bytes after payload")
    vectors = np.frombuffer(payload, dtype="<f4").reshape(count, dim)

    meta_path = sidecar_path(path)
    if not os.path.exists(meta_path):
        raise TruncatedPayload(f"{path}: sidecar {meta_path} missing")
    with open(meta_path, "r", encoding="utf-8") as fh:
        raw_lines = [json.loads(line) for line in fh if line.strip()]
    if not raw_lines or "_manifest" not in raw_lines[0]:
        raise TruncatedPayload(f"{meta_path}: first line must carry the manifest")
    manifest = raw_lines[0]["_manifest"]
    declared_normalized = bool(manifest.get("normalized", True))
    records = raw_lines[1:]
    if len(records) != count:
        raise TruncatedPayload(
            f"{meta_path}: {len(records)} sidecar records for {count} vectors"
        )
    ids = tuple(str(rec["id"]) for rec in records)
    metas = tuple(
        {"class": rec.get("class", ""), "split": rec.get("split"),
         "extra": rec.get("extra", {})}
        for rec in records
    )

    renormalized = False
    if count:
        if not np.all(np.isfinite(vectors)):
            raise NonFinite(f"{path}: payload contains NaN or Inf")
        norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
        off = ~np.isclose(norms, 1.0, rtol=0.0, atol=NORM_TOLERANCE)
        if not declared_normalized:
            off = np.ones_like(off)
        if np.any(off):
            if np.any(norms[off] <= 1e-12):
                bad = ids[int(np.argmax((norms <= 1e-12) & off))]
                raise ZeroNorm(f"{path}: record {bad!r} has (near-)zero norm")
            wide = vectors.astype(np.float64)
            wide[off] /= norms[off, None]
            vectors = wide.astype(np.float32)
            renormalized = True
    vectors = np.ascontiguousarray(vectors, dtype=np.float32)
    vectors.setflags(write=False)
    return EmbeddingStore(
        dim=dim, ids=ids, vectors=vectors, meta=metas,
        normalized=True, renormalized=renormalized,
    )
