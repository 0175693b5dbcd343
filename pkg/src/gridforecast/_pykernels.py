"""Pure numpy fallbacks for the compiled kernels in ``_ckernels``."""
import numpy as np


def box_sum(src: np.ndarray, k_rows: int, k_cols: int) -> np.ndarray:
    h, w = src.shape
    hr, hc = k_rows // 2, k_cols // 2
    tmp = np.zeros((h, w))
    for d in range(-hc, hc + 1):
        lo, hi = max(0, -d), min(w, w - d)
        if lo < hi:
            tmp[:, lo:hi] += src[:, lo + d:hi + d]
    out = np.zeros((h, w))
    for d in range(-hr, hr + 1):
        lo, hi = max(0, -d), min(h, h - d)
        if lo < hi:
            out[lo:hi] += tmp[lo + d:hi + d]
    return out


def greedy_sample(work: np.ndarray, num_samples: int, half_rows: int, half_cols: int):
    h, w = work.shape
    rows, cols, confs = [], [], []
    flat = work.reshape(-1)
    for _ in range(num_samples):
        k = int(np.argmax(flat))
        best = flat[k]
        if best == -np.inf:
            break
        i, j = divmod(k, w)
        rows.append(i)
        cols.append(j)
        confs.append(float(best))
        work[max(i - half_rows, 0):i + half_rows + 1, max(j - half_cols, 0):j + half_cols + 1] = -np.inf
    return rows, cols, confs


def draw_line(out: np.ndarray, r0: int, c0: int, r1: int, c1: int) -> None:
    h, w = out.shape
    dr, dc = abs(r1 - r0), abs(c1 - c0)
    sr = 1 if r1 >= r0 else -1
    sc = 1 if c1 >= c0 else -1
    err = dc - dr
    r, c = r0, c0
    while True:
        if 0 <= r < h and 0 <= c < w:
            out[r, c] = 1
        if r == r1 and c == c1:
            break
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr
