"""Run manifests: reproducibility records attached to every emitted artifact."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import ValidationError

# Required keys and their types; output_files entries carry path + sha256.
MANIFEST_SCHEMA = {
    "command": str,
    "parameters": dict,
    "tool_version": str,
    "timestamp": str,
    "input_hashes": dict,
    "output_files": list,
}


def sha256_file(path: Path | str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    command: str
    parameters: dict
    tool_version: str
    timestamp: str
    input_hashes: dict = field(default_factory=dict)
    output_files: list = field(default_factory=list)

    @classmethod
    def create(cls, command: str, parameters: dict, tool_version: str,
               inputs: dict[str, str | Path] | None = None) -> "RunManifest":
        hashes = {name: sha256_file(p) for name, p in (inputs or {}).items()}
        return cls(
            command=command,
            parameters={k: parameters[k] for k in sorted(parameters)},
            tool_version=tool_version,
            timestamp=datetime.now(timezone.utc).isoformat(),
            input_hashes=hashes,
        )

    def record_output(self, path: Path | str, base_dir: Path | str) -> None:
        """Hash an emitted file and list it relative to the output directory."""
        path = Path(path)
        rel = path.relative_to(base_dir)
        self.output_files.append({"path": str(rel), "sha256": sha256_file(path)})

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
            "input_hashes": self.input_hashes,
            "output_files": self.output_files,
        }

    def write(self, path: Path | str) -> None:
        payload = self.to_dict()
        validate_manifest(payload)
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")


def validate_manifest(payload: dict) -> None:
    """Check a manifest dict against the schema; raise on any defect."""
    for key, typ in MANIFEST_SCHEMA.items():
        if key not in payload:
            raise ValidationError(f"manifest missing key {key!r}")
        if not isinstance(payload[key], typ):
            raise ValidationError(f"manifest key {key!r} must be {typ.__name__}")
    for entry in payload["output_files"]:
        if not isinstance(entry, dict) or set(entry) != {"path", "sha256"}:
            raise ValidationError(f"malformed output entry {entry!r}")
        if len(entry["sha256"]) != 64:
            raise ValidationError(f"not a sha256 digest: {entry['sha256']!r}")


def verify_outputs(payload: dict, base_dir: Path | str) -> None:
    """Re-hash the listed outputs and raise if any digest disagrees."""
    for entry in payload["output_files"]:
        actual = sha256_file(Path(base_dir) / entry["path"])
        if actual != entry["sha256"]:
            raise ValidationError(f"hash mismatch for {entry['path']}")
