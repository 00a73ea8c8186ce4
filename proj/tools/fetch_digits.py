#!/usr/bin/env python3
"""Prepare the handwritten-digits subset used by specs/digits.json.

Writes data/digits05.csv: the 8x8 digit images for classes 0-5 as raw
64-dimensional rows (values 0..16). Clustering runs in this pixel space.
With --embedding it also writes data/digits05_tsne.csv, a 2D t-SNE layout
used only for plot output.
"""

import argparse
import pathlib

import numpy as np
from sklearn.datasets import load_digits


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data", type=pathlib.Path)
    parser.add_argument("--classes", default=5, type=int,
                        help="keep digits 0..CLASSES (default 5)")
    parser.add_argument("--embedding", action="store_true",
                        help="also write a 2D t-SNE embedding for plotting")
    args = parser.parse_args()

    digits = load_digits()
    mask = digits.target <= args.classes
    points = digits.data[mask]
    labels = digits.target[mask]
    args.out_dir.mkdir(parents=True, exist_ok=True)

    np.savetxt(args.out_dir / "digits05.csv", points, delimiter=",", fmt="%.17g")
    np.savetxt(args.out_dir / "digits05_true.csv", labels, fmt="%d")
    print(f"wrote {points.shape[0]} x {points.shape[1]} points to "
          f"{args.out_dir / 'digits05.csv'}")

    if args.embedding:
        from sklearn.manifold import TSNE

        coords = TSNE(n_components=2, random_state=0).fit_transform(points)
        np.savetxt(args.out_dir / "digits05_tsne.csv", coords, delimiter=",",
                   fmt="%.17g")
        print(f"wrote embedding to {args.out_dir / 'digits05_tsne.csv'}")


if __name__ == "__main__":
    main()
