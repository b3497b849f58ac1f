"""Independent brute-force oracles, kept free of the package's linear algebra."""

import itertools

import numpy as np


def span_mod_p(vectors, p):
    """All linear combinations of ``vectors`` mod p, as a set of tuples."""
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        return set()
    d = len(vectors[0])
    out = set()
    for cs in itertools.product(range(p), repeat=len(vectors)):
        out.add(tuple(sum(c * v[i] for c, v in zip(cs, vectors)) % p for i in range(d)))
    return out


def omega_np(n_blocks):
    """Block-diagonal canonical form for ``n_blocks`` toy bits (n = 1 each)."""
    d = 2 * n_blocks
    W = np.zeros((d, d), dtype=np.int64)
    for b in range(n_blocks):
        W[2 * b, 2 * b + 1] = 1
        W[2 * b + 1, 2 * b] = -1
    return W


def omega_canonical(n):
    W = np.zeros((2 * n, 2 * n), dtype=np.int64)
    W[:n, n:] = np.eye(n, dtype=np.int64)
    W[n:, :n] = -np.eye(n, dtype=np.int64)
    return W


def decode(codes, p, d):
    """Base-p codes -> (N, d, d) matrices, most significant digit first (row-major)."""
    out = np.empty((len(codes), d * d), dtype=np.int64)
    c = codes.copy()
    for k in range(d * d - 1, -1, -1):
        out[:, k] = c % p
        c //= p
    return out.reshape(-1, d, d)


def encode(mats, p):
    flat = np.asarray(mats, dtype=np.int64).reshape(len(mats), -1)
    code = np.zeros(len(flat), dtype=np.int64)
    for k in range(flat.shape[1]):
        code = code * p + flat[:, k]
    return code


def gate_mask(mats, W, p):
    """``M^T W M == W (mod p)`` for a batch of matrices."""
    G = np.einsum("nki,kl,nlj->nij", mats, W, mats) % p
    return np.all(G == W % p, axis=(1, 2))


def bernoulli_sample_crosscheck(enumerated_codes, p, d, W, fraction=0.1, seed=0, chunk=1 << 22):
    """Sample each candidate matrix with probability ``fraction``; compare gate to membership.

    Returns ``(sampled, passing, mismatches)`` where a mismatch is a sampled
    candidate that passes the gate but was not enumerated or vice versa.
    """
    rng = np.random.default_rng(seed)
    enumerated_codes = np.sort(np.asarray(enumerated_codes, dtype=np.int64))
    total = p ** (d * d)
    sampled = passing = mismatches = 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        codes = codes[rng.random(len(codes)) < fraction]
        mats = decode(codes, p, d)
        ok = gate_mask(mats, W, p)
        member = np.isin(codes, enumerated_codes, assume_unique=False)
        sampled += len(codes)
        passing += int(ok.sum())
        mismatches += int((ok != member).sum())
    return sampled, passing, mismatches
