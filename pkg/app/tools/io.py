"""
File IO Tools

Observation CSV ingestion and emission, JSON and CSV/TSV output. Every
output file is written to a temporary sibling and renamed into place.
"""

import json
import logging
import os
import re
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Union

import pandas as pd
from pydantic import ValidationError

from app.errors import ParseError, RunIoError
from app.models.observation import AuctionObservation

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["campaign_id", "bid", "auctions", "wins", "clicks", "ecpm_cost", "ctr"]
PathLike = Union[str, Path]

_UNSAFE = re.compile(r"[^A-Za-z0-9._-]")


# ============================================
# INPUT
# ============================================

def read_observations(path: PathLike) -> Dict[str, List[AuctionObservation]]:
    """
    Parse an observation CSV into per-campaign lists, keyed in campaign-id order.

    Raises:
        RunIoError: the file cannot be read
        ParseError: missing columns or an invalid row (line numbers count the header as 1)
    """
    path = Path(path)
    if not path.is_file():
        raise RunIoError(f"input file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise ParseError("file is empty, expected a header row", line=1) from None
    except pd.errors.ParserError as e:
        raise ParseError(f"malformed CSV: {e}") from None
    except OSError as e:
        raise RunIoError(f"cannot read {path}: {e}") from e

    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise ParseError(f"missing columns: {', '.join(missing)}", line=1)

    campaigns: Dict[str, List[AuctionObservation]] = {}
    for i, row in enumerate(frame[CSV_COLUMNS].to_dict(orient="records")):
        try:
            obs = AuctionObservation(**row)
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first["loc"]) or "row"
            raise ParseError(f"{field}: {first['msg']}", line=i + 2) from None
        campaigns.setdefault(obs.campaign_id, []).append(obs)

    logger.info(f"📥 Read {len(frame)} rows for {len(campaigns)} campaigns from {path}")
    return dict(sorted(campaigns.items()))


# ============================================
# OUTPUT
# ============================================

def safe_name(campaign_id: str) -> str:
    """File-system safe form of a campaign id."""
    return _UNSAFE.sub("_", campaign_id) or "_"


def write_text_atomic(path: PathLike, text: str) -> Path:
    """Write text to `path` through a temporary file in the same directory."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
    except OSError as e:
        raise RunIoError(f"cannot write {path}: {e}") from e
    logger.debug(f"wrote {path}")
    return path


def write_json(path: PathLike, payload: Any) -> Path:
    return write_text_atomic(path, json.dumps(payload, indent=2) + "\n")


def write_frame(path: PathLike, frame: pd.DataFrame, sep: str = ",", float_format: str = "%.6f") -> Path:
    return write_text_atomic(
        path, frame.to_csv(index=False, sep=sep, float_format=float_format, lineterminator="\n")
    )


def write_observations(path: PathLike, observations: Iterable[AuctionObservation]) -> Path:
    """Emit observations in the ingestion CSV format."""
    frame = pd.DataFrame([obs.model_dump() for obs in observations], columns=CSV_COLUMNS)
    frame["bid"] = frame["bid"].map("{:.2f}".format)
    frame["ecpm_cost"] = frame["ecpm_cost"].map("{:.6f}".format)
    frame["ctr"] = frame["ctr"].map("{:.10g}".format)
    return write_frame(path, frame)


def write_curve_tsv(path: PathLike, rows: List[Dict[str, float]], decimals: int = 3) -> Path:
    """Plot-ready curve: cost, observed clicks, fitted clicks, fitted derivative."""
    frame = pd.DataFrame(rows, columns=["cost", "observed_clicks", "fitted_clicks", "fitted_derivative"])
    return write_frame(path, frame, sep="\t", float_format=f"%.{decimals}f")
