#!/usr/bin/env python3
"""Writes the bundled 32x32 grayscale test pairs to data/images/."""
import pathlib

import numpy as np

SIZE = 32
OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "images"


def grid():
    c = (np.arange(SIZE) + 0.5) / SIZE
    return np.meshgrid(c, c, indexing="xy")


def blob(x, y, cx, cy, s):
    return np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * s * s))


def to_pgm(path, img):
    img = np.clip(img, 0.0, 1.0)
    q = np.maximum(1, np.rint(img * 255)).astype(int)
    with open(path, "w") as f:
        f.write(f"P2\n{SIZE} {SIZE}\n255\n")
        for row in q:
            f.write(" ".join(str(v) for v in row) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    x, y = grid()
    rng = np.random.default_rng(20240601)

    a = 0.05 + 0.9 * blob(x, y, 0.35, 0.4, 0.12)
    b = 0.05 + 0.7 * blob(x, y, 0.65, 0.6, 0.15)
    to_pgm(OUT / "blobs_a.pgm", a)
    to_pgm(OUT / "blobs_b.pgm", b)

    r = np.hypot(x - 0.5, y - 0.5)
    a = 0.1 + 0.8 * np.exp(-((r - 0.3) ** 2) / 0.005)
    b = 0.1 + 0.8 * (blob(x, y, 0.3, 0.3, 0.08) + blob(x, y, 0.7, 0.75, 0.1))
    to_pgm(OUT / "ring_a.pgm", a)
    to_pgm(OUT / "ring_b.pgm", b)

    a = rng.uniform(0.02, 1.0, size=(SIZE, SIZE))
    b = 0.5 * rng.uniform(0.02, 1.0, size=(SIZE, SIZE)) + 0.5 * blob(x, y, 0.5, 0.5, 0.2)
    to_pgm(OUT / "noise_a.pgm", a)
    to_pgm(OUT / "noise_b.pgm", b)


if __name__ == "__main__":
    main()
