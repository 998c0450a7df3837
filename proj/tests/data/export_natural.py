#!/usr/bin/env python3
"""Export a small corpus of 8-bit grayscale photographs as binary PGM files.

Images come from scikit-image's bundled sample data.  Each output is cropped
so both dimensions are multiples of 4.  Run once from the repo root:

    python3 tests/data/export_natural.py

Files land in tests/data/natural/ and are committed; the codec tests read
them directly and never invoke this script.
"""

import os

import numpy as np
import skimage.data as data
from skimage.color import rgb2gray
from skimage.transform import resize


def to_gray_u8(img):
    if img.ndim == 3:
        img = rgb2gray(img)
        img = (img * 255.0).round()
    img = np.asarray(img, dtype=np.float64)
    return np.clip(img, 0, 255).astype(np.uint8)


def crop_mult4(img, max_h=None, max_w=None):
    h, w = img.shape
    if max_h is not None:
        h = min(h, max_h)
    if max_w is not None:
        w = min(w, max_w)
    h -= h % 4
    w -= w % 4
    y0 = (img.shape[0] - h) // 2
    x0 = (img.shape[1] - w) // 2
    return img[y0:y0 + h, x0:x0 + w]


def fit_512(img):
    h, w = img.shape
    if (h, w) == (512, 512):
        return img
    out = resize(img.astype(np.float64), (512, 512), order=1,
                 anti_aliasing=True, preserve_range=True)
    return np.clip(out.round(), 0, 255).astype(np.uint8)


def write_pgm(img, path):
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())
    print("%s  %dx%d" % (path, w, h))


def main():
    out_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "natural")
    os.makedirs(out_dir, exist_ok=True)

    # Full-resolution 512x512 photographs (timing plus training material).
    big = {
        "camera": to_gray_u8(data.camera()),
        "moon": to_gray_u8(data.moon()),
        "astronaut": fit_512(to_gray_u8(data.astronaut())),
        "grass": fit_512(to_gray_u8(data.grass())),
        "gravel": fit_512(to_gray_u8(data.gravel())),
    }
    for name, img in big.items():
        assert img.shape == (512, 512), (name, img.shape)
        write_pgm(img, os.path.join(out_dir, name + "_512.pgm"))

    # Smaller crops with varied aspect ratios for the round-trip grid.
    small = {
        "coffee": crop_mult4(to_gray_u8(data.coffee()), 256, 256),
        "chelsea": crop_mult4(to_gray_u8(data.chelsea()), 256, 256),
        "coins": crop_mult4(to_gray_u8(data.coins()), 256, 256),
        "page": crop_mult4(to_gray_u8(data.page())),
        "text": crop_mult4(to_gray_u8(data.text())),
    }
    for name, img in small.items():
        write_pgm(img, os.path.join(out_dir, "%s_%dx%d.pgm" % (name, img.shape[1], img.shape[0])))


if __name__ == "__main__":
    main()
