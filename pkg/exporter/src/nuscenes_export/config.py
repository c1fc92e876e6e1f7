"""Export run parameters."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class ExportConfig:
    """Where to read the dataset and what to write.

    map_radius_m bounds the exported map: only elements within this
    distance of the ego route end up in the document.
    """

    root: Path
    split: str
    out_dir: Path
    map_radius_m: float = 80.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "root", Path(self.root))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        if not self.map_radius_m > 0:
            raise ValueError(
                f"map_radius_m must be > 0, got {self.map_radius_m}")
        if not self.split:
            raise ValueError("split must be non-empty")
