"""Exact arithmetic, word metrics and subgroup distortion in T_n and H_k."""
from .core import (
    GeneratorIndex,
    GroupElement,
    HeisenbergForm,
    Letter,
    NormalForm,
    Word,
    evaluate_word,
    generator,
    generator_order,
    heisenberg_to_matrix,
    identity,
    inverse,
    matrix_to_heisenberg,
    multiply,
    normal_form,
)
from .collection import collect
from .errors import NilMetricError, ResourceLimit
from .exact import bfs_ball, exact_length
from .kernels import BACKEND
from .quasimetric import calibrate, estimate_element
from .synthesis import short_word, short_word_H

__version__ = "0.1.0"
