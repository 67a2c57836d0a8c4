# essence_kit/goeritz.py
"""Goeritz forms of checkerboard surfaces and their exact minima."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import sympy

from essence_kit.diagram import (
    LinkDiagram,
    checkerboard_coloring,
    doubled_crossings,
    other_color,
    tait_label,
)
from essence_kit.errors import HypothesisError
from essence_kit.logconf import logging

log = logging.getLogger(__name__)

_SLACK = 1e-9


@dataclass(frozen=True)
class GoeritzForm:
    matrix: tuple[tuple[int, ...], ...]
    surface_color: str
    retained: tuple[int, ...] = ()  # opposite-color faces, in row order
    deleted: int | None = None
    sign_convention: tuple[int, ...] = ()  # eta per crossing
    negated: bool = False

    @property
    def n(self) -> int:
        return len(self.matrix)

    def value(self, x) -> int:
        return sum(self.matrix[i][j] * x[i] * x[j] for i in range(self.n) for j in range(self.n))

    def negate(self) -> "GoeritzForm":
        return GoeritzForm(
            tuple(tuple(-a for a in row) for row in self.matrix),
            self.surface_color, self.retained, self.deleted,
            self.sign_convention, not self.negated,
        )

    def as_dict(self) -> dict:
        return {
            "matrix": [list(row) for row in self.matrix],
            "surface_color": self.surface_color,
            "basis_provenance": {"retained": list(self.retained), "deleted": self.deleted},
            "sign_convention": list(self.sign_convention),
            "negated": self.negated,
        }


def goeritz_matrix(diagram: LinkDiagram, color: str) -> GoeritzForm:
    """Rows are the opposite-color regions minus the highest-indexed one.

    eta(c) = +1 when ``color`` has the A label at c, so the all-A color of a
    reduced alternating diagram gets the positive-definite matrix.
    """
    if doubled_crossings(diagram):
        raise HypothesisError("Goeritz matrix needs a reduced diagram", ("reduced",))
    coloring = checkerboard_coloring(diagram)
    regions = coloring.faces_of(other_color(color))
    index = {f: i for i, f in enumerate(regions)}
    full = [[0] * len(regions) for _ in regions]
    eta = []
    for c in range(diagram.n):
        sign = 1 if tait_label(diagram, coloring, c, color) == "A" else -1
        eta.append(sign)
        q = 0 if coloring.colors[diagram.face_at(c, 0)] != color else 1
        i, j = index[diagram.face_at(c, q)], index[diagram.face_at(c, q + 2)]
        full[i][j] -= sign
        full[j][i] -= sign
    for i in range(len(regions)):
        full[i][i] = -sum(full[i][j] for j in range(len(regions)) if j != i)
    keep = len(regions) - 1
    matrix = tuple(tuple(full[i][j] for j in range(keep)) for i in range(keep))
    return GoeritzForm(
        matrix, color,
        retained=tuple(regions[:keep]),
        deleted=regions[-1] if regions else None,
        sign_convention=tuple(eta),
    )


def is_positive_definite(form: GoeritzForm) -> bool:
    m = sympy.Matrix(form.matrix) if form.n else None
    return all(m[:k, :k].det() > 0 for k in range(1, form.n + 1))


def definite_form(form: GoeritzForm) -> GoeritzForm:
    if is_positive_definite(form):
        return form
    if is_positive_definite(form.negate()):
        return form.negate()
    raise HypothesisError(f"Goeritz form of the {form.surface_color} surface is indefinite", ("definite",))


def form_minimum(form: GoeritzForm) -> float:
    """Exact minimum of x^T G x over nonzero integer x (Fincke-Pohst).

    The bound starts at the smallest diagonal entry and shrinks to the best
    exact value found.  Floating-point Cholesky data only prunes; every
    candidate is re-evaluated in integers.
    """
    if not is_positive_definite(form):
        raise HypothesisError("form minimum needs a positive-definite form", ("definite",))
    n = form.n
    if n == 0:
        return math.inf
    g = np.array(form.matrix, dtype=float)
    r = np.linalg.cholesky(g).T  # g = r^T r, r upper triangular
    qd = np.diag(r) ** 2
    qo = r / np.diag(r)[:, None]
    best = min(form.matrix[i][i] for i in range(n))
    x = [0] * n

    def search(i: int, budget: float):
        nonlocal best
        center = -sum(qo[i, j] * x[j] for j in range(i + 1, n))
        radius = math.sqrt(max(budget, 0.0) / qd[i])
        lo = math.ceil(center - radius - _SLACK)
        hi = math.floor(center + radius + _SLACK)
        for xi in range(lo, hi + 1):
            x[i] = xi
            rest = budget - qd[i] * (xi - center) ** 2
            if rest < -_SLACK * (1 + best):
                continue
            if i == 0:
                if any(x):
                    value = form.value(x)
                    if value < best:
                        best = value
            else:
                search(i - 1, rest)
        x[i] = 0

    search(n - 1, best * (1 + _SLACK) + _SLACK)
    log.debug("form minimum %d over %d-dimensional lattice", best, n)
    return best


def exhaustive_form_minimum(form: GoeritzForm, bound: int) -> int:
    """Minimum over nonzero x with max-norm at most ``bound``."""
    values = (
        form.value(x)
        for x in itertools.product(range(-bound, bound + 1), repeat=form.n)
        if any(x)
    )
    return min(values)
