"""Split-Rhat and effective sample size for multi-chain draws."""

from __future__ import annotations

import numpy as np


def compute_diagnostics(by_chain: np.ndarray, names) -> dict:
    """Per-parameter split-Rhat and ESS.

    ``by_chain`` has shape (chains, draws, dim). Chains are split in half for
    Rhat; ESS truncates the autocorrelation sum at the first negative paired
    sum. Degenerate (constant) chains report Rhat = NaN and ESS = 0.
    """
    chains, draws, dim = by_chain.shape
    if draws < 8:
        raise ValueError("need at least 4 draws per half-chain for diagnostics")
    half = draws // 2
    split = np.concatenate(
        [by_chain[:, :half, :], by_chain[:, half : 2 * half, :]], axis=0
    )
    result = {}
    for j, name in enumerate(names):
        seqs = split[:, :, j]
        result[name] = {
            "split_rhat": _rhat(seqs),
            "ess": _ess(seqs),
        }
    return result


def _rhat(seqs: np.ndarray) -> float:
    m, n = seqs.shape
    means = seqs.mean(axis=1)
    variances = seqs.var(axis=1, ddof=1)
    w = variances.mean()
    b_over_n = means.var(ddof=1)
    if w <= 0.0:
        return float("nan")
    var_plus = (n - 1) / n * w + b_over_n
    return float(np.sqrt(var_plus / w))


def _ess(seqs: np.ndarray) -> float:
    m, n = seqs.shape
    variances = seqs.var(axis=1, ddof=1)
    w = variances.mean()
    b_over_n = seqs.mean(axis=1).var(ddof=1) if m > 1 else 0.0
    var_plus = (n - 1) / n * w + b_over_n
    if var_plus <= 0.0:
        return 0.0

    acov = np.stack([_autocov(seqs[i]) for i in range(m)])  # (m, n)
    rho = 1.0 - (w - acov.mean(axis=0)) / var_plus
    rho[0] = 1.0

    # Sum paired autocorrelations until the first negative pair.
    tau = 0.0
    t = 0
    while t + 1 < n:
        pair = rho[t] + rho[t + 1]
        if pair < 0.0:
            break
        tau += pair
        t += 2
    tau = max(2.0 * tau - 1.0, 1.0 / n)
    return float(m * n / tau)


def _autocov(x: np.ndarray) -> np.ndarray:
    n = len(x)
    xc = x - x.mean()
    size = 2 ** int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(xc, size)
    acov = np.fft.irfft(f * np.conjugate(f), size)[:n].real
    return acov / n
