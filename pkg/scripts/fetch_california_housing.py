#!/usr/bin/env python3
"""Download the California housing table and write it as a CSV that the
``csv`` dataset kind can ingest directly.

This is the one script in the repository that needs network access; nothing
in the package or the test suite depends on it.  The source is the StatLib
mirror hosted on figshare (the same archive scikit-learn fetches).

The raw file has one row per census block group with the columns

    longitude, latitude, housingMedianAge, totalRooms, totalBedrooms,
    population, households, medianIncome, medianHouseValue

and this script derives the conventional 8-feature form (rooms, bedrooms,
and occupancy averaged per household; the target rescaled to units of
$100,000):

    med_inc, house_age, ave_rooms, ave_bedrms, population, ave_occup,
    latitude, longitude -> median_house_value

Usage:

    python3 scripts/fetch_california_housing.py --out california.csv

then point an experiment config at it:

    "dataset": {"kind": "csv", "path": "california.csv",
                "target": "median_house_value"}
"""

import argparse
import csv
import io
import sys
import tarfile
import urllib.request

ARCHIVE_URL = "https://ndownloader.figshare.com/files/5976036"
MEMBER = "CaliforniaHousing/cal_housing.data"
EXPECTED_ROWS = 20640

HEADER = ["med_inc", "house_age", "ave_rooms", "ave_bedrms", "population",
          "ave_occup", "latitude", "longitude", "median_house_value"]


def fetch_archive(url: str) -> bytes:
    print(f"downloading {url} ...", file=sys.stderr)
    with urllib.request.urlopen(url) as response:
        return response.read()


def parse_rows(raw: bytes) -> list[list[float]]:
    with tarfile.open(fileobj=io.BytesIO(raw), mode="r:gz") as archive:
        member = archive.extractfile(MEMBER)
        if member is None:
            raise SystemExit(f"archive does not contain {MEMBER}")
        text = member.read().decode("ascii")

    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        (longitude, latitude, age, rooms, bedrooms, population, households,
         income, value) = (float(f) for f in line.split(","))
        rows.append([
            income,                  # med_inc
            age,                     # house_age
            rooms / households,      # ave_rooms
            bedrooms / households,   # ave_bedrms
            population,              # population
            population / households, # ave_occup
            latitude,
            longitude,
            value / 100_000.0,       # median_house_value, in $100k
        ])
    if len(rows) != EXPECTED_ROWS:
        raise SystemExit(
            f"expected {EXPECTED_ROWS} rows, parsed {len(rows)}; "
            "the upstream archive may have changed")
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="california.csv",
                        help="destination CSV path (default california.csv)")
    parser.add_argument("--url", default=ARCHIVE_URL,
                        help="archive URL override (e.g. a local mirror)")
    args = parser.parse_args()

    rows = parse_rows(fetch_archive(args.url))
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
