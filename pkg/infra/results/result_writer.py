#####################################################################################
# Result persistence: CSV tables with a fixed column order and float format, plus a
# JSON run manifest next to each table.
#####################################################################################
import json
import logging
import platform
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
import scipy

OUTAGE_COLUMNS = [
    "scheme",
    "K",
    "M",
    "R",
    "snr_db",
    "p_out_mc",
    "ci_lo",
    "ci_hi",
    "p_out_theorem1",
    "n_trials",
    "seed",
    "p_out_first_order",
]

CAPACITY_COLUMNS = [
    "scheme",
    "K",
    "M",
    "R",
    "snr_db",
    "p_out_mc",
    "ci_lo",
    "ci_hi",
    "c_soc",
    "c_soc_lo",
    "c_soc_hi",
    "c_soc_theorem1",
    "n_trials",
    "seed",
]

GAP_COLUMNS = [
    "K",
    "M",
    "snr_db",
    "median_rel_err",
    "p95_rel_err",
    "median_rel_err_exact",
    "n_channels",
    "n_noise",
    "seed",
]

FLOAT_FORMAT = "%.12g"


class ResultWriter:
    def __init__(self, out_path: Path) -> None:
        self.out_path = Path(out_path)
        self.logger = logging.getLogger(__name__)

    @property
    def manifest_path(self) -> Path:
        return self.out_path.with_name(self.out_path.stem + ".manifest.json")

    def sibling(self, suffix: str) -> Path:
        return self.out_path.with_name(self.out_path.stem + suffix)

    #####################################################################################
    # Write rows in the given column order; None becomes an empty cell.
    #####################################################################################
    def write_table(self, rows: Sequence[Dict[str, Any]], columns: List[str]) -> Path:
        self.out_path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(list(rows), columns=columns)
        frame.to_csv(self.out_path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
        self.logger.info(f"Wrote {len(frame)} rows to {self.out_path}")
        return self.out_path

    def write_json(self, path: Path, payload: Any) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
        return path

    #####################################################################################
    # Manifest echoing the resolved config; same seed and config give the same bytes.
    #####################################################################################
    def write_manifest(self, config: Dict[str, Any], extra: Optional[Dict[str, Any]] = None) -> Path:
        manifest = {
            "config": config,
            "seed": config.get("seed"),
            "table": self.out_path.name,
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pandas": pd.__version__,
            },
            **(extra or {}),
        }
        self.write_json(self.manifest_path, manifest)
        self.logger.info(f"Wrote run manifest to {self.manifest_path}")
        return self.manifest_path
