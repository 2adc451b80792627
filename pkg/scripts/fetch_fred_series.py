#!/usr/bin/env python3
"""
Download a FRED series and write the two-column CSV that qarcast reads.

    python scripts/fetch_fred_series.py UNRATE unemployment.csv --semiannual \
        --start 1948-01-01 --end 2025-06-30
    python scripts/fetch_fred_series.py GASREGW gasoline.csv \
        --start 1990-08-20 --end 2004-02-16

``--semiannual`` averages the monthly observations of each half year
(labels 1948-01 and 1948-07), giving the 155 observations of the
unemployment example. The weekly gasoline series is used as is.
"""

import argparse
import io
import logging
import sys

import pandas as pd
import requests

FRED_CSV_URL = "https://fred.stlouisfed.org/graph/fredgraph.csv"

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def fetch_series(series_id, timeout=60):
    response = requests.get(FRED_CSV_URL, params={"id": series_id}, timeout=timeout)
    response.raise_for_status()
    df = pd.read_csv(io.StringIO(response.text))
    date_col, value_col = df.columns[0], df.columns[1]
    df[date_col] = pd.to_datetime(df[date_col])
    df[value_col] = pd.to_numeric(df[value_col], errors="coerce")
    df = df.dropna().rename(columns={date_col: "date", value_col: "value"})
    logger.info(f"Fetched {len(df)} observations of {series_id}")
    return df


def to_semiannual(df):
    half = (df["date"].dt.month > 6).astype(int)
    grouped = df.groupby([df["date"].dt.year, half])["value"].mean()
    labels = [f"{year}-{'07' if h else '01'}" for year, h in grouped.index]
    return pd.DataFrame({"date": labels, "value": grouped.to_numpy()})


def main():
    parser = argparse.ArgumentParser(description="Fetch a FRED series as a qarcast input CSV")
    parser.add_argument('series_id', help='FRED series identifier, e.g. UNRATE or GASREGW')
    parser.add_argument('output', help='Output CSV path')
    parser.add_argument('--start', help='First date kept (YYYY-mm-dd)')
    parser.add_argument('--end', help='Last date kept (YYYY-mm-dd)')
    parser.add_argument('--semiannual', action='store_true', help='Average into half-year observations')
    args = parser.parse_args()

    try:
        df = fetch_series(args.series_id)
    except requests.RequestException as e:
        logger.error(f"Download failed: {str(e)}")
        sys.exit(1)

    if args.start:
        df = df[df["date"] >= pd.Timestamp(args.start)]
    if args.end:
        df = df[df["date"] <= pd.Timestamp(args.end)]
    if args.semiannual:
        df = to_semiannual(df)
    else:
        df = df.assign(date=df["date"].dt.strftime("%Y-%m-%d"))

    df.to_csv(args.output, index=False)
    print(f"Wrote {len(df)} observations to {args.output}")


if __name__ == "__main__":
    main()
