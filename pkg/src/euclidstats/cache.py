"""On-disk cache for enumeration results.

Two artifact kinds: per-denominator histogram matrices (npz, the expensive
product) and ensemble summaries (JSON, the documented exchange format).
Writes are atomic whole-file replacements; stale schema versions are treated
as cache misses.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

ENV_CACHE_DIR = "EUCLID_CACHE_DIR"


class CacheError(Exception):
    """Cache file exists but cannot be read back consistently."""


def _sanitize(token: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "-", token)


def resolve_cache_dir(explicit: str | Path | None) -> Path | None:
    """Cache directory: the environment variable wins over the explicit path."""
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    if explicit is None:
        return None
    return Path(explicit)


def _atomic_write_bytes(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Cache:
    """File cache rooted at a directory; a None root disables caching."""

    def __init__(self, root: str | Path | None):
        self.root = Path(root) if root is not None else None

    def enabled(self) -> bool:
        return self.root is not None

    # -- histogram matrices ------------------------------------------------

    def _matrix_name(self, algo_id: str, cost_desc: str, n: int) -> str:
        return f"rows_{algo_id}_{_sanitize(cost_desc)}_{n}.npz"

    def load_rows(self, algo_id: str, cost_desc: str, n: int):
        """Coprime histogram rows for some cached N' >= n, or None.

        Rows are per-denominator, so a larger cached run restricts to any
        smaller N by slicing.
        """
        if not self.enabled() or not self.root.exists():
            return None
        pattern = re.compile(
            rf"^rows_{re.escape(algo_id)}_{re.escape(_sanitize(cost_desc))}_(\d+)\.npz$"
        )
        best = None
        for p in self.root.iterdir():
            m = pattern.match(p.name)
            if m:
                n_cached = int(m.group(1))
                if n_cached >= n and (best is None or n_cached < best[0]):
                    best = (n_cached, p)
        if best is None:
            return None
        try:
            with np.load(best[1], allow_pickle=False) as f:
                if int(f["schema_version"]) != SCHEMA_VERSION:
                    return None
                rows = f["rows"]
                span = Fraction(str(f["span"]))
        except Exception as exc:
            raise CacheError(f"unreadable matrix cache {best[1]}: {exc}") from exc
        return rows, span

    def store_rows(self, algo_id: str, cost_desc: str, n: int, rows, span: Fraction) -> None:
        if not self.enabled():
            return
        path = self.root / self._matrix_name(algo_id, cost_desc, n)
        import io

        buf = io.BytesIO()
        np.savez_compressed(
            buf,
            rows=rows,
            schema_version=np.int64(SCHEMA_VERSION),
            span=np.str_(str(span)),
        )
        _atomic_write_bytes(path, buf.getvalue())

    # -- summaries (documented JSON exchange format) ------------------------

    def _summary_name(self, algo_id: str, cost_desc: str, n: int, reduced: bool) -> str:
        kind = "omega" if reduced else "omegatilde"
        return f"summary_{algo_id}_{_sanitize(cost_desc)}_{n}_{kind}.json"

    def load_summary(self, algo_id: str, cost_desc: str, n: int, reduced: bool) -> dict | None:
        if not self.enabled():
            return None
        path = self.root / self._summary_name(algo_id, cost_desc, n, reduced)
        if not path.exists():
            return None
        try:
            payload = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CacheError(f"corrupt summary cache {path}: {exc}") from exc
        if payload.get("schema_version") != SCHEMA_VERSION:
            return None
        key = (payload.get("algo"), payload.get("cost"), payload.get("N"), payload.get("reduced"))
        if key != (algo_id, cost_desc, n, reduced):
            raise CacheError(f"summary cache {path} holds a different key {key}")
        return payload

    def store_summary(self, payload: dict) -> None:
        if not self.enabled():
            return
        path = self.root / self._summary_name(
            payload["algo"], payload["cost"], payload["N"], payload["reduced"]
        )
        _atomic_write_bytes(path, json.dumps(payload, indent=1).encode())
