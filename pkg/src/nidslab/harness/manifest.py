"""Run manifests: every artifact named and hashed, written even on failure."""

from __future__ import annotations

import hashlib
import json
import os
from typing import Optional


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir, config_obj: dict, artifacts: list,
                   status: str = "ok", failure_stage: Optional[str] = None,
                   failure_reason: Optional[str] = None) -> str:
    entries = {}
    for name in sorted(artifacts):
        path = os.path.join(out_dir, name)
        if os.path.exists(path):
            entries[name] = {"sha256": _sha256(path), "bytes": os.path.getsize(path)}
    manifest = {
        "status": status,
        "failure_stage": failure_stage,
        "failure_reason": failure_reason,
        "config": config_obj,
        "artifacts": entries,
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
    return path
