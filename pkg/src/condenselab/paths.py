from __future__ import annotations

from pathlib import Path
from typing import Dict

from condenselab.config import Config


def get_output_root(config: Config) -> Path:
    return Path(config.output_root).expanduser().resolve()


def ensure_directories(output_root: Path) -> Dict[str, Path]:
    reports_dir = output_root / "reports"
    tables_dir = output_root / "tables"
    transcripts_dir = output_root / "transcripts"

    reports_dir.mkdir(parents=True, exist_ok=True)
    tables_dir.mkdir(parents=True, exist_ok=True)
    transcripts_dir.mkdir(parents=True, exist_ok=True)

    return {
        "reports": reports_dir,
        "tables": tables_dir,
        "transcripts": transcripts_dir,
    }
