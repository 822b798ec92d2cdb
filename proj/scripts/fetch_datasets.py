#!/usr/bin/env python3
"""Writes the classification datasets used by the logistic experiments to data/.

breast_cancer.csv comes from scikit-learn's bundled copy and is checked
against a pinned sha256. The remaining datasets are downloaded from the UCI
repository and are not checksummed.
"""

import argparse
import hashlib
import io
import sys
import urllib.request
from pathlib import Path

import pandas as pd

BREAST_CANCER_SHA256 = "ff48c5072d9d62e22b8967dd98b6f5eabee2388f759da9c3bc8c73dddb07927c"

UCI = {
    "heart": (
        "https://archive.ics.uci.edu/ml/machine-learning-databases/statlog/heart/heart.dat",
        " ",
    ),
    "ionosphere": (
        "https://archive.ics.uci.edu/ml/machine-learning-databases/ionosphere/ionosphere.data",
        ",",
    ),
}


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_breast_cancer(out: Path) -> None:
    from sklearn.datasets import load_breast_cancer

    ds = load_breast_cancer(as_frame=True)
    frame = ds.frame.copy()
    frame.columns = [c.replace(" ", "_") for c in frame.columns]
    frame.to_csv(out, index=False, float_format="%.17g")
    digest = sha256(out)
    if digest != BREAST_CANCER_SHA256:
        sys.exit(f"checksum mismatch for {out}: {digest}")
    print(f"{out} sha256={digest}")


def write_uci(name: str, out: Path) -> None:
    url, sep = UCI[name]
    with urllib.request.urlopen(url, timeout=60) as resp:
        raw = resp.read().decode()
    frame = pd.read_csv(io.StringIO(raw), sep=sep, header=None, skipinitialspace=True)
    frame.columns = [f"x{i}" for i in range(frame.shape[1] - 1)] + ["target"]
    frame.to_csv(out, index=False)
    print(f"{out} sha256={sha256(out)} (unpinned)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default=str(Path(__file__).resolve().parent.parent / "data"))
    parser.add_argument("--uci", action="store_true", help="also download the UCI datasets")
    args = parser.parse_args()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_breast_cancer(out_dir / "breast_cancer.csv")
    if args.uci:
        for name in UCI:
            write_uci(name, out_dir / f"{name}.csv")


if __name__ == "__main__":
    main()
