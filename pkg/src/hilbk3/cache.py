"""Disk cache of canonical JSON payloads keyed by operation + arguments.

Entries are versioned by the package version; stale versions are ignored
rather than migrated, and a cache hit must be bit-identical to what the
computation would emit.
"""

from __future__ import annotations

import hashlib
import json
import os

from . import __version__


def _key_path(cache_dir, operation, args):
    blob = json.dumps(
        {"op": operation, "args": args, "version": __version__}, sort_keys=True
    )
    digest = hashlib.sha256(blob.encode()).hexdigest()[:24]
    return os.path.join(cache_dir, f"{operation}-{digest}.json")


def fetch(cache_dir, operation, args):
    if not cache_dir:
        return None
    path = _key_path(cache_dir, operation, args)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        stored = json.load(fh)
    if stored.get("version") != __version__:
        return None
    return stored["payload"]


def store(cache_dir, operation, args, payload):
    if not cache_dir:
        return
    os.makedirs(cache_dir, exist_ok=True)
    path = _key_path(cache_dir, operation, args)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump({"version": __version__, "payload": payload}, fh, sort_keys=True)
    os.replace(tmp, path)
