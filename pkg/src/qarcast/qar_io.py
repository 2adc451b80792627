"""
Series ingestion and report writers.

Reads the two-column (label, value) CSV files used for real-data backtests
and writes result tables in the format implied by the output file extension.
"""

import json
import logging
import os

import numpy as np
import pandas as pd

from .exceptions import EmptyFile, NonMonotoneLabels, ParseError
from .qar_series import TimeSeries

logger = logging.getLogger(__name__)

CSV_SIGNIFICANT_DIGITS = 6


def _parse_labels(raw: pd.Series) -> pd.Index:
    """Numbers when every label is numeric, else dates when every label parses, else strings."""
    numeric = pd.to_numeric(raw, errors="coerce")
    if not numeric.isna().any():
        return pd.Index(numeric.to_numpy())
    try:
        return pd.DatetimeIndex(pd.to_datetime(raw, errors="raise"))
    except (ValueError, TypeError):
        return pd.Index(raw.astype(str).to_numpy())


def load_series_csv(file_path) -> TimeSeries:
    """
    Load a time series from a comma-separated file with a header row.

    The first column holds the time labels and the second the observations;
    rows are kept in file order.

    Args:
        file_path (str): Path to the CSV file

    Returns:
        TimeSeries: Values with their labels

    Raises:
        EmptyFile: No data rows.
        ParseError: A value cell is not a finite number (``row`` is the
            1-based data row).
        NonMonotoneLabels: Labels are not strictly increasing.
    """
    if os.path.exists(file_path) and os.path.getsize(file_path) == 0:
        raise EmptyFile(f"{file_path} is empty")
    try:
        df = pd.read_csv(file_path, dtype=str, keep_default_na=False, skipinitialspace=True,
                         encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise EmptyFile(f"{file_path} is empty")
    except pd.errors.ParserError as e:
        raise ParseError(f"cannot parse {file_path}: {e}")

    if len(df) == 0:
        raise EmptyFile(f"{file_path} has a header but no data rows")
    if df.shape[1] < 2:
        raise ParseError(f"{file_path} needs two columns (label, value), found {df.shape[1]}")

    values = pd.to_numeric(df.iloc[:, 1].str.strip(), errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        row = int(bad[0]) + 1
        raise ParseError(f"row {row}: value '{df.iloc[bad[0], 1]}' is not a finite number", row=row)

    labels = _parse_labels(df.iloc[:, 0].str.strip())
    if not (labels.is_monotonic_increasing and labels.is_unique):
        raise NonMonotoneLabels(f"{file_path}: time labels must be strictly increasing")

    logger.info(f"Loaded {len(values)} observations from {file_path}")
    return TimeSeries(values, labels)


def _json_default(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


def save_json(data, output_path):
    """Write ``data`` as indented JSON at full float precision."""
    output_dir = os.path.dirname(output_path)
    if output_dir and not os.path.exists(output_dir):
        os.makedirs(output_dir, exist_ok=True)
    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, default=_json_default)
        f.write("\n")


def save_table(df, output_path):
    """
    Save a result table in the format given by the file extension.

    ``.csv`` rounds floats to 6 significant digits, ``.tsv``/``.txt`` are
    tab-delimited, ``.json`` keeps full precision (records), ``.xlsx`` goes
    through openpyxl.

    Args:
        df (pd.DataFrame): Table to save
        output_path (str): Destination file
    """
    try:
        output_dir = os.path.dirname(output_path)
        if output_dir and not os.path.exists(output_dir):
            os.makedirs(output_dir, exist_ok=True)
            logger.info(f"Created output directory: {output_dir}")

        file_ext = os.path.splitext(output_path)[1].lower()

        if file_ext == ".csv":
            df.to_csv(output_path, index=False, float_format=f"%.{CSV_SIGNIFICANT_DIGITS}g",
                      lineterminator="\n")
        elif file_ext in (".tsv", ".txt"):
            df.to_csv(output_path, sep="\t", index=False, lineterminator="\n")
        elif file_ext == ".json":
            save_json(df.to_dict(orient="records"), output_path)
        elif file_ext == ".xlsx":
            df.to_excel(output_path, index=False, engine="openpyxl")
        else:
            raise ValueError(f"Unsupported output format: {file_ext}. Use .csv, .tsv, .txt, .json or .xlsx.")

        logger.info(f"Saved {len(df)} rows to {output_path}")
    except Exception as e:
        logger.error(f"Error saving table to {output_path}: {str(e)}")
        raise
