"""Small reference matrices with known max-algebra behaviour."""

import numpy as np

from .maxcore import MaxMatrix

# Two-cycle with damped self-loops: asymptotic period 2, limits A and A².
SWAP_HALF = MaxMatrix([[0.5, 1.0], [1.0, 0.5]])
SWAP_HALF_SQUARED = MaxMatrix([[1.0, 0.5], [0.5, 1.0]])

# Diagonal and triangular 2x2 spectra.
DIAG_4_5 = MaxMatrix([[4.0, 0.0], [0.0, 5.0]])
UPPER_4_5 = MaxMatrix([[4.0, 2.0], [0.0, 5.0]])
UPPER_5_4 = MaxMatrix([[5.0, 2.0], [0.0, 4.0]])

# Reducible 3x3: a critical two-cycle on {1, 2} feeding a decaying loop at 3.
TWO_BLOCK = MaxMatrix([[0.2, 1.0, 4.0], [1.0, 0.5, 6.0], [0.0, 0.0, 0.9]])
TWO_BLOCK_ODD_LIMIT = MaxMatrix([[0.5, 1.0, 5.4], [1.0, 0.5, 6.0], [0.0, 0.0, 0.0]])
TWO_BLOCK_EVEN_LIMIT = MaxMatrix([[1.0, 0.5, 6.0], [0.5, 1.0, 5.4], [0.0, 0.0, 0.0]])

# Pairwise commuting 5x5 family with asymptotic periods 3, 3 and 2.
COMMUTING_FAMILY = (
    MaxMatrix([
        [0, 1, 0, 8, 5],
        [0, 0, 1, 5, 8],
        [1, 0, 0, 8, 5],
        [0, 0, 0, 1, 0.5],
        [0, 0, 0, 0.5, 1],
    ]),
    MaxMatrix([
        [0, 0, 1, 9, 9],
        [1, 0, 0, 9, 9],
        [0, 1, 0, 9, 9],
        [0, 0, 0, 1, 1],
        [0, 0, 0, 1, 1],
    ]),
    MaxMatrix([
        [1, 0, 0, 8, 9],
        [0, 1, 0, 8, 9],
        [0, 0, 1, 8, 9],
        [0, 0, 0, 0.8, 1],
        [0, 0, 0, 1, 0.8],
    ]),
)
COMMUTING_FAMILY_PERIODS = (3, 3, 2)

# Non-commuting pair sharing the eigenvectors u (eigenvalue 1 for both) and
# v (eigenvalue 0.9 for the first matrix, 1 for the second).
SHARED_EIGVEC_PAIR = (
    MaxMatrix([
        [0.9, 0.45, 5, 6, 27],
        [0.45, 0.9, 1, 23, 8],
        [0, 0, 0.9, 1, 0],
        [0, 0, 0, 0.2, 1],
        [0, 0, 1, 0, 0],
    ]),
    MaxMatrix([
        [1, 1, 27, 6, 2],
        [0.5, 1, 17, 3, 23],
        [0, 0, 0.4, 1, 0],
        [0, 0, 1, 0.8, 1],
        [0, 0, 0.9, 1, 0.2],
    ]),
)
SHARED_U = np.array([27.0, 23.0, 1.0, 1.0, 1.0])
SHARED_V = np.array([2.0, 1.0, 0.0, 0.0, 0.0])
