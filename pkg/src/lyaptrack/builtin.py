"""Built-in data for the two worked examples.

Example 1: a 2-state plant follows a 3-state reference model.
Example 2: the same plant, started from a disturbed initial state, follows a
2-state reference model.  Published gains are rounded to four decimals, so
comparisons against them use a 5e-4 tolerance.
"""
from __future__ import annotations

import numpy as np

from .simulator import Disturbance
from .synthesis import PlantModel, ReferenceModel

PUBLISHED_TOL = 5e-4

PLANT = PlantModel(
    A=[[2.0, -3.0], [0.0, 2.0]],
    B=[[1.0, -2.0], [9.0, -1.0]],
    C=[[0.5, 1.0]],
    x0=[[0.0], [1.0]],
)

REFERENCE_3 = ReferenceModel(
    Am=[[0.9, 1.0, 1.0], [0.0, 0.9, 1.0], [0.0, 0.0, 0.9]],
    Cm=[[1.0, 0.9, 0.9]],
    x0m=[[0.0], [1.0], [0.1]],
)

REFERENCE_2 = ReferenceModel(
    Am=[[0.9, 1.0], [0.0, 0.9]],
    Cm=[[1.0, 0.9]],
    x0m=[[0.0], [1.0]],
)

DISTURBANCE = Disturbance(alpha=2.0, beta=[[0.3], [0.5]])

# Closed loops that reproduce the two published feedback gains.
TARGET_MAIN = np.diag([-0.9, 0.8])
TARGET_FAST = np.diag([-0.5, 0.8])

PUBLISHED_K_MAIN = np.array([[0.1706, -0.3176], [1.5353, -1.6588]])
PUBLISHED_K_FAST = np.array([[0.1471, -0.3176], [1.3235, -1.6588]])

PUBLISHED_GAINS = {
    "example1": {
        "G": np.array([[0.1276, 0.1149, 0.1149], [-0.2509, -0.2258, -0.2258]]),
        "Ge": np.array([[1.2474, 1.1227, 1.1227], [0.3763, 0.3387, 0.3387]]),
        "H": np.array([[-0.0262, -0.0527, -0.0789], [-0.5744, -1.1553, -1.7297]]),
    },
    "example2": {
        "G": np.array([[0.1276, 0.1149], [-0.2509, -0.2258]]),
        "Ge": np.array([[1.2474, 1.1227], [0.3763, 0.3387]]),
        "H": np.array([[-0.0262, -0.0527], [-0.5744, -1.1553]]),
    },
}

# Tolerance claims attached to the example-2 figures: (epsilon, T).
CLAIMED_TOLERANCE = {"main": (0.5, 1), "fast": (0.2, 1)}
