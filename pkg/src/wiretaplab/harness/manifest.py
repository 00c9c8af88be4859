"""Run manifests: content-hashed artifact inventory for reproducibility audits."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .. import __version__
from .config import ExperimentConfig, config_hash

__all__ = ["RunManifest", "file_sha256"]


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Config snapshot hash, per-stage wall clock, and artifact hashes."""

    config_digest: str
    software_version: str = __version__
    stages: list[dict] = field(default_factory=list)
    artifacts: dict[str, str] = field(default_factory=dict)

    @classmethod
    def for_config(cls, cfg: ExperimentConfig) -> "RunManifest":
        return cls(config_digest=config_hash(cfg))

    def add_stage(self, name: str, seconds: float) -> None:
        self.stages.append({"name": name, "seconds": round(seconds, 3)})

    def add_artifact(self, root: Path, path: Path) -> None:
        self.artifacts[str(path.relative_to(root))] = file_sha256(path)

    def timed_stage(self, name: str):
        """Context manager recording the stage wall clock."""
        manifest = self

        class _Stage:
            def __enter__(self):
                self.t0 = time.perf_counter()
                return self

            def __exit__(self, *exc):
                manifest.add_stage(name, time.perf_counter() - self.t0)
                return False

        return _Stage()

    def write(self, root: Path) -> Path:
        path = root / "manifest.json"
        payload = {
            "config_digest": self.config_digest,
            "software_version": self.software_version,
            "stages": self.stages,
            "artifacts": self.artifacts,
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def read(cls, root: Path) -> "RunManifest":
        payload = json.loads((root / "manifest.json").read_text())
        return cls(
            config_digest=payload["config_digest"],
            software_version=payload["software_version"],
            stages=payload["stages"],
            artifacts=payload["artifacts"],
        )

    def verify(self, root: Path) -> list[str]:
        """Paths whose content no longer matches the recorded hash."""
        bad = []
        for rel, digest in self.artifacts.items():
            target = root / rel
            if not target.exists() or file_sha256(target) != digest:
                bad.append(rel)
        return bad
