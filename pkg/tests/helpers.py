"""Shared random instance generators for the test suite."""

import numpy as np

from opband import BlockBandedOperator, SpaceSpec


def random_space(rng, p, max_dim=64, max_width=6, min_dim=4):
    """Random cut structure with block widths 1..max_width and dim <= max_dim."""
    target = int(rng.integers(min_dim, max_dim + 1))
    cuts = [0]
    while cuts[-1] < target:
        width = int(rng.integers(1, max_width + 1))
        cuts.append(min(cuts[-1] + width, target))
    return SpaceSpec(p, tuple(cuts))


def random_operator(rng, space, band, normalize_sup=False):
    """Dense-within-band random complex operator on the given space."""
    nb = space.nblocks
    band = min(band, max(0, nb - 1))
    sizes = space.block_sizes
    blocks = {}
    for i in range(1, nb + 1):
        for j in range(max(1, i - band), min(nb, i + band) + 1):
            blocks[(i, j)] = rng.standard_normal(
                (sizes[i - 1], sizes[j - 1])
            ) + 1j * rng.standard_normal((sizes[i - 1], sizes[j - 1]))
    op = BlockBandedOperator(space, band, blocks)
    if normalize_sup and op.sup_block_norm > 0:
        op = op.scaled(1.0 / op.sup_block_norm)
    return op


def random_vector(rng, space):
    return rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
