"""Provenance record written next to every primary output."""

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from . import __version__
from .loaders import write_json
from .utils import calculate_sha256, get_timestamp


@dataclass
class RunManifest:
    """Command, resolved config, input digests, seed, version and duration."""

    command: str
    config: Dict[str, Any]
    seed: int
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    parameters: Dict[str, Any] = field(default_factory=dict)
    version: str = __version__
    started_at: str = field(default_factory=get_timestamp)
    duration_seconds: float = 0.0
    _start: float = field(default_factory=time.perf_counter, repr=False)

    def add_input(self, path: Optional[Path]) -> None:
        if path is not None:
            self.inputs[str(path)] = calculate_sha256(Path(path))

    def add_output(self, path: Path) -> None:
        self.outputs.append(str(path))

    def finish(self) -> None:
        self.duration_seconds = round(time.perf_counter() - self._start, 3)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'version': self.version,
            'seed': self.seed,
            'config': self.config,
            'parameters': self.parameters,
            'inputs': [{'path': path, 'sha256': digest} for path, digest in self.inputs.items()],
            'outputs': list(self.outputs),
            'started_at': self.started_at,
            'duration_seconds': self.duration_seconds,
        }

    def write(self, primary_output: Path) -> Path:
        """Write ``<primary_output>.manifest.json`` and return its path."""
        self.finish()
        path = Path(primary_output)
        manifest_path = path.with_name(path.name + '.manifest.json')
        write_json(manifest_path, self.to_dict())
        return manifest_path
