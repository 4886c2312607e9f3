"""Counter-based random streams keyed by model and mode indices.

Each (seed, model, l, n) block gets its own Philox stream, so the draws for
one block never depend on which other blocks were generated or in which
order.  Blocks are drawn realization-major: asking for fewer realizations
returns a prefix of the rows.
"""
import numpy as np

MODEL_KEYS = {"sphere": 0, "spin_ball": 1, "rho": 2}


def stream(seed, *key):
    ss = np.random.SeedSequence(int(seed) & (2 ** 64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def normal_block(seed, model, ell, n, shape):
    """Standard normals of ``shape`` (first axis = realization) for one mode block."""
    return stream(seed, MODEL_KEYS[model], ell, n).standard_normal(shape)
