#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
settings.py - Version and tunable defaults for the quadrangulation lab

Usage:
    from settings import LabSettings, __version__

    settings = LabSettings.from_env()
    print(settings.output_dir)
"""

import os
from dataclasses import dataclass, asdict
from pathlib import Path

__version__ = "0.3.0"

OUTPUT_DIR_ENV = "QUADLAB_OUTPUT_DIR"


@dataclass
class LabSettings:
    """Defaults shared by the library and the CLI."""
    output_dir: Path = Path(".")
    # Exhaustive g-tree enumeration refuses sizes above this
    enumeration_cap: int = 6
    # Sampling tables use exact integers up to this n, floats beyond
    exact_max_n: int = 2000
    # 12^n overflows a double a little above n = 285
    float_count_max_n: int = 280
    mc_samples: int = 1_000_000
    mc_chunk: int = 200_000
    dirichlet_alpha: float = 0.5
    precision_bits: int = 128

    def to_dict(self) -> dict:
        d = asdict(self)
        d["output_dir"] = str(self.output_dir)
        return d

    @classmethod
    def from_env(cls) -> 'LabSettings':
        settings = cls()
        out = os.environ.get(OUTPUT_DIR_ENV)
        if out:
            settings.output_dir = Path(out).expanduser()
        return settings


DEFAULTS = LabSettings()
