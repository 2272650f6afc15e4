"""
conic_core.py - Small Dense Conic Solver (LP / SOCP / Hermitian SDP)

Hosts the two subproblem classes of the SDR alternating optimization:
the covariance SDP (Hermitian PSD blocks, linear and second-order-cone
constraints) and the phase-step SOCP (real variables, convex quadratics).

Components:
- ConicProblem: builder over Hermitian PSD blocks and real variable blocks,
  with affine expressions, linear (in)equalities, second-order cones and
  convex quadratic constraints (lowered to cones at build time)
- StandardForm: min c^T x s.t. G x + s = h, A x = b, s in K, with
  K = nonnegative orthant x second-order cones x PSD cones (svec layout)
- InteriorPointBackend: homogeneous self-dual primal-dual path following
  with Nesterov-Todd scaling and Mehrotra predictor-corrector
- CvxpyBackend: optional cross-check through cvxpy
- create_backend(): factory selecting a backend by name
- dump_problem(): text triplet export of a standard-form problem

Hermitian blocks:
    An n x n Hermitian X is stored as n^2 real parameters (diagonal, real
    parts of the strict upper triangle, imaginary parts of the strict upper
    triangle). Positive semidefiniteness is imposed on the real embedding
    [[Re X, -Im X], [Im X, Re X]], which is PSD iff X is. Linear functionals
    Re tr(C X) act on the parameters directly, so reported objectives are
    complex-domain values.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from models import ConicBuildError

logger = logging.getLogger(__name__)


# =============================================================================
# STATUS AND OPTIONS
# =============================================================================


class ConicStatus(str, Enum):
    """Outcome of a conic solve."""

    OPTIMAL = "optimal"
    OPTIMAL_INACCURATE = "optimal_inaccurate"
    INFEASIBLE_CERTIFICATE = "infeasible_certificate"
    UNBOUNDED = "unbounded"
    MAX_ITERS = "max_iters"
    NUMERICAL_FAILURE = "numerical_failure"

    @property
    def has_solution(self) -> bool:
        return self in (ConicStatus.OPTIMAL, ConicStatus.OPTIMAL_INACCURATE)


@dataclass
class SolverOptions:
    """Interior-point tolerances and limits."""

    max_iters: int = 200
    feastol: float = 1e-8
    abstol: float = 1e-10
    reltol: float = 1e-8
    inaccurate_tol: float = 1e-5
    step_fraction: float = 0.99
    equilibrate: bool = True

    @classmethod
    def from_config(cls, config: Optional[Dict[str, Any]] = None) -> "SolverOptions":
        """Create options from the `conic` section of config.yaml."""
        if config is None:
            from settings import load_config

            config = load_config()
        conic = config.get("conic", {})
        return cls(
            max_iters=conic.get("max_iters", 200),
            feastol=conic.get("feastol", 1e-8),
            abstol=conic.get("abstol", 1e-10),
            reltol=conic.get("reltol", 1e-8),
            step_fraction=conic.get("step_fraction", 0.99),
        )


# =============================================================================
# SYMMETRIC AND HERMITIAN LAYOUTS
# =============================================================================


@lru_cache(maxsize=None)
def _svec_layout(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows, cols = np.triu_indices(n)
    scale = np.where(rows == cols, 1.0, math.sqrt(2.0))
    return rows, cols, scale


def svec_dim(n: int) -> int:
    return n * (n + 1) // 2


def svec(mat: np.ndarray) -> np.ndarray:
    """Upper triangle with sqrt(2) on off-diagonals; batched over leading axes."""
    rows, cols, scale = _svec_layout(mat.shape[-1])
    return mat[..., rows, cols] * scale


def smat(vec: np.ndarray, n: int) -> np.ndarray:
    """Inverse of svec; batched over leading axes."""
    rows, cols, scale = _svec_layout(n)
    out = np.zeros(vec.shape[:-1] + (n, n))
    values = vec / scale
    out[..., rows, cols] = values
    out[..., cols, rows] = values
    return out


def hermitian_param_count(n: int) -> int:
    return n * n


def hermitian_from_params(params: np.ndarray, n: int) -> np.ndarray:
    """Rebuild the Hermitian matrix from its n^2 real parameters."""
    rows, cols = np.triu_indices(n, 1)
    upper = rows.size
    out = np.zeros((n, n), dtype=complex)
    out[np.diag_indices(n)] = params[:n]
    values = params[n : n + upper] + 1j * params[n + upper : n + 2 * upper]
    out[rows, cols] = values
    out[cols, rows] = values.conj()
    return out


def hermitian_to_params(mat: np.ndarray) -> np.ndarray:
    n = mat.shape[0]
    rows, cols = np.triu_indices(n, 1)
    upper = mat[rows, cols]
    return np.concatenate([np.real(np.diag(mat)), upper.real, upper.imag])


def hermitian_param_coeffs(c_mat: np.ndarray) -> np.ndarray:
    """Coefficients g with Re tr(C X) = g^T params(X) for any complex C."""
    c_mat = np.asarray(c_mat, dtype=complex)
    rows, cols = np.triu_indices(c_mat.shape[0], 1)
    diag = np.real(np.diag(c_mat))
    re_part = np.real(c_mat[rows, cols] + c_mat[cols, rows])
    im_part = np.imag(c_mat[rows, cols] - c_mat[cols, rows])
    return np.concatenate([diag, re_part, im_part])


def real_embedding(mat: np.ndarray) -> np.ndarray:
    """[[Re X, -Im X], [Im X, Re X]]; batched over leading axes."""
    re, im = np.real(mat), np.imag(mat)
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


@lru_cache(maxsize=None)
def embedding_matrix(n: int) -> np.ndarray:
    """Linear map from Hermitian parameters to svec of the 2n x 2n embedding."""
    count = hermitian_param_count(n)
    basis = np.stack([hermitian_from_params(np.eye(count)[p], n) for p in range(count)])
    return svec(real_embedding(basis)).T


# =============================================================================
# AFFINE EXPRESSIONS
# =============================================================================


@dataclass(frozen=True)
class VariableBlock:
    """A named group of real decision variables."""

    name: str
    kind: str  # "hermitian" or "real"
    dim: int
    offset: int

    @property
    def size(self) -> int:
        return hermitian_param_count(self.dim) if self.kind == "hermitian" else self.dim


class Affine:
    """
    Vector-valued real affine expression sum_b C_b x_b + d.

    Each C_b has shape (rows, size_b); scalar expressions have rows = 1.
    """

    __slots__ = ("coeffs", "const")
    __array_ufunc__ = None

    def __init__(self, coeffs: Optional[Dict[str, np.ndarray]] = None, const: Any = 0.0):
        self.const = np.atleast_1d(np.asarray(const, dtype=float)).copy()
        self.coeffs: Dict[str, np.ndarray] = {}
        for name, mat in (coeffs or {}).items():
            mat = np.asarray(mat, dtype=float)
            self.coeffs[name] = mat.reshape(self.const.size, -1) if mat.ndim == 1 else mat

    @property
    def rows(self) -> int:
        return self.const.size

    @classmethod
    def constant(cls, value: Any) -> "Affine":
        return cls({}, value)

    @classmethod
    def stack(cls, exprs: Sequence["Affine"]) -> "Affine":
        """Concatenate expressions row-wise."""
        names = {name for e in exprs for name in e.coeffs}
        sizes = {name: e.coeffs[name].shape[1] for e in exprs for name in e.coeffs}
        coeffs = {}
        for name in names:
            blocks = [
                e.coeffs[name] if name in e.coeffs else np.zeros((e.rows, sizes[name]))
                for e in exprs
            ]
            coeffs[name] = np.vstack(blocks)
        return cls(coeffs, np.concatenate([e.const for e in exprs]))

    def _lift(self, other: Union["Affine", float]) -> "Affine":
        if isinstance(other, Affine):
            return other
        return Affine.constant(np.full(self.rows, float(other)))

    def __add__(self, other: Union["Affine", float]) -> "Affine":
        other = self._lift(other)
        coeffs = {name: mat.copy() for name, mat in self.coeffs.items()}
        for name, mat in other.coeffs.items():
            coeffs[name] = coeffs[name] + mat if name in coeffs else mat.copy()
        return Affine(coeffs, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "Affine":
        return Affine({n: -m for n, m in self.coeffs.items()}, -self.const)

    def __sub__(self, other: Union["Affine", float]) -> "Affine":
        return self + (-self._lift(other))

    def __rsub__(self, other: Union["Affine", float]) -> "Affine":
        return self._lift(other) - self

    def __mul__(self, scalar: float) -> "Affine":
        scalar = float(scalar)
        return Affine({n: scalar * m for n, m in self.coeffs.items()}, scalar * self.const)

    __rmul__ = __mul__

    def evaluate(self, values: Dict[str, np.ndarray]) -> np.ndarray:
        """Value at real block vectors (Hermitian blocks as parameter vectors)."""
        out = self.const.copy()
        for name, mat in self.coeffs.items():
            out = out + mat @ values[name]
        return out


# =============================================================================
# QUADRATIC LOWERING
# =============================================================================


@dataclass(frozen=True)
class SocLowering:
    """
    xi^T P xi + q^T xi + c <= 0 rewritten as
    || [2 F xi ; 1 + q^T xi + c] || <= 1 - q^T xi - c, with P = F^T F.
    """

    factor: np.ndarray
    linear: np.ndarray
    constant: float

    def value(self, xi: np.ndarray) -> float:
        return float(np.sum((self.factor @ xi) ** 2) + self.linear @ xi + self.constant)

    def head(self, xi: np.ndarray) -> float:
        return float(1.0 - self.linear @ xi - self.constant)

    def tail(self, xi: np.ndarray) -> np.ndarray:
        return np.concatenate([2.0 * self.factor @ xi, [1.0 + self.linear @ xi + self.constant]])

    def contains(self, xi: np.ndarray) -> bool:
        return bool(np.linalg.norm(self.tail(xi)) <= self.head(xi))


def lower_quadratic_to_soc(
    gram: np.ndarray,
    linear: np.ndarray,
    constant: float,
    tol: float = 1e-10,
) -> SocLowering:
    """
    Lower x^H P x + Re(l^H x) + c <= 0 to a second-order cone.

    A complex (Hermitian) Gram over x in C^n is lowered over the real vector
    [Re x; Im x]; a real symmetric Gram over x in R^n is used as is.

    Raises:
        ConicBuildError: P has an eigenvalue below -tol * trace(P)
    """
    gram = np.asarray(gram)
    linear = np.asarray(linear)
    if np.iscomplexobj(gram) or np.iscomplexobj(linear):
        gram = np.asarray(gram, dtype=complex)
        gram = 0.5 * (gram + gram.conj().T)
        p_real = real_embedding(gram)
        q_real = np.concatenate([np.real(linear), np.imag(linear)]).astype(float)
    else:
        p_real = 0.5 * (gram + gram.T).astype(float)
        q_real = linear.astype(float)

    eigvals, eigvecs = linalg.eigh(p_real)
    trace = float(np.sum(np.abs(eigvals)))
    if eigvals.size and eigvals[0] < -tol * max(trace, np.finfo(float).tiny):
        raise ConicBuildError(
            f"Gram matrix is indefinite (min eigenvalue {eigvals[0]:.3e}, trace {trace:.3e})"
        )
    keep = eigvals > 1e-14 * max(float(eigvals[-1]) if eigvals.size else 0.0, np.finfo(float).tiny)
    factor = np.sqrt(eigvals[keep])[:, None] * eigvecs[:, keep].T
    return SocLowering(factor=factor, linear=q_real, constant=float(constant))


# =============================================================================
# PROBLEM BUILDER
# =============================================================================


@dataclass(frozen=True)
class ConeDims:
    """Cone dimensions: orthant size, SOC sizes, PSD orders (matrix sides)."""

    l: int = 0
    q: Tuple[int, ...] = ()
    s: Tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return self.l + sum(self.q) + sum(svec_dim(n) for n in self.s)

    @property
    def degree(self) -> int:
        return self.l + len(self.q) + sum(self.s)


@dataclass
class StandardForm:
    """min c^T x s.t. G x + s = h, A x = b, s in K(dims)."""

    c: np.ndarray
    G: np.ndarray
    h: np.ndarray
    A: np.ndarray
    b: np.ndarray
    dims: ConeDims
    row_scale: np.ndarray
    eq_scale: np.ndarray
    cone_rows: Dict[str, slice] = field(default_factory=dict)
    eq_rows: Dict[str, slice] = field(default_factory=dict)
    objective_sign: float = 1.0
    objective_constant: float = 0.0


@dataclass
class RawResult:
    """Backend output on a standard-form problem (scaled rows)."""

    status: ConicStatus
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    s: np.ndarray
    iterations: int = 0
    primal_residual: float = math.inf
    dual_residual: float = math.inf
    gap: float = math.inf
    message: str = ""


@dataclass
class ConicSolution:
    """Primal values per block, duals per constraint, status and KKT residuals."""

    status: ConicStatus
    values: Dict[str, np.ndarray]
    duals: Dict[str, np.ndarray]
    objective: float
    kkt_residuals: Dict[str, float]
    iterations: int = 0
    message: str = ""


class ConicProblem:
    """
    Builder for small conic programs.

    Example:
        prob = ConicProblem()
        w = prob.add_hermitian("W", 4)
        prob.minimize(prob.trace_form(w, np.eye(4)))
        prob.add_inequality("sinr", 1.0 - prob.trace_form(w, np.outer(h, h.conj())))
        solution = solve(prob)
    """

    def __init__(self, name: str = "conic"):
        self.name = name
        self.blocks: Dict[str, VariableBlock] = {}
        self._offset = 0
        self._objective = Affine.constant(0.0)
        self._sense = 1.0
        self._equalities: List[Tuple[str, Affine]] = []
        self._inequalities: List[Tuple[str, Affine]] = []
        self._cones: List[Tuple[str, Affine, Affine]] = []

    # -- variables ----------------------------------------------------------

    def _add_block(self, name: str, kind: str, dim: int) -> VariableBlock:
        if name in self.blocks:
            raise ConicBuildError(f"duplicate variable block '{name}'")
        block = VariableBlock(name=name, kind=kind, dim=dim, offset=self._offset)
        self.blocks[name] = block
        self._offset += block.size
        return block

    def add_hermitian(self, name: str, n: int) -> VariableBlock:
        """Hermitian n x n PSD matrix variable."""
        return self._add_block(name, "hermitian", n)

    def add_real(self, name: str, size: int) -> VariableBlock:
        """Free real vector variable."""
        return self._add_block(name, "real", size)

    @property
    def n_vars(self) -> int:
        return self._offset

    # -- expressions --------------------------------------------------------

    def trace_form(self, block: VariableBlock, c_mat: np.ndarray) -> Affine:
        """Re tr(C X) for a Hermitian block X."""
        return Affine({block.name: hermitian_param_coeffs(c_mat)[None, :]})

    def imag_trace_form(self, block: VariableBlock, c_mat: np.ndarray) -> Affine:
        """Im tr(C X) = Re tr(-j C X)."""
        return Affine({block.name: hermitian_param_coeffs(-1j * np.asarray(c_mat))[None, :]})

    def linear_form(self, block: VariableBlock, coeffs: np.ndarray) -> Affine:
        """coeffs @ x for a real block (coeffs 1-D for a scalar, 2-D for a vector)."""
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
        return Affine({block.name: coeffs}, np.zeros(coeffs.shape[0]))

    def entry(self, block: VariableBlock, index: int) -> Affine:
        row = np.zeros(block.size)
        row[index] = 1.0
        return self.linear_form(block, row)

    def vector(self, block: VariableBlock) -> Affine:
        """The whole real block as a vector expression."""
        return self.linear_form(block, np.eye(block.size))

    # -- objective and constraints -----------------------------------------

    def minimize(self, expr: Affine) -> None:
        self._objective, self._sense = expr, 1.0

    def maximize(self, expr: Affine) -> None:
        self._objective, self._sense = expr, -1.0

    def add_equality(self, name: str, expr: Affine) -> None:
        """expr == 0 (row-wise)."""
        self._equalities.append((name, expr))

    def add_inequality(self, name: str, expr: Affine) -> None:
        """expr <= 0 (row-wise)."""
        self._inequalities.append((name, expr))

    def add_soc(self, name: str, head: Affine, tail: Affine) -> None:
        """||tail|| <= head."""
        if head.rows != 1:
            raise ConicBuildError("cone head must be scalar")
        self._cones.append((name, head, tail))

    def add_quadratic(
        self,
        name: str,
        block: VariableBlock,
        gram: np.ndarray,
        linear: np.ndarray,
        constant: float,
        extra: Optional[Affine] = None,
    ) -> SocLowering:
        """
        Convex quadratic constraint over a real block xi:
        xi^T P xi + q^T xi + c + extra <= 0, stored as a second-order cone.
        A complex Hermitian P acts on a block laid out as [Re v; Im v].
        """
        lowering = lower_quadratic_to_soc(gram, linear, constant)
        if lowering.factor.shape[1] != block.size:
            raise ConicBuildError(
                f"quadratic '{name}' has dimension {lowering.factor.shape[1]}, block has {block.size}"
            )
        affine = self.linear_form(block, lowering.linear) + lowering.constant
        if extra is not None:
            affine = affine + extra
        scaled = Affine({block.name: 2.0 * lowering.factor}, np.zeros(lowering.factor.shape[0]))
        tail = Affine.stack([scaled, 1.0 + affine]) if lowering.factor.size else 1.0 + affine
        self.add_soc(name, 1.0 - affine, tail)
        return lowering

    # -- compilation --------------------------------------------------------

    def _row(self, expr: Affine) -> np.ndarray:
        mat = np.zeros((expr.rows, self.n_vars))
        for name, coeffs in expr.coeffs.items():
            block = self.blocks[name]
            mat[:, block.offset : block.offset + block.size] += coeffs
        return mat

    def compile(self, equilibrate: bool = True) -> StandardForm:
        """Assemble the standard form, optionally normalizing rows."""
        n = self.n_vars
        c = self._sense * self._row(self._objective)[0]
        objective_constant = float(self._objective.const[0])

        g_parts, h_parts, scales = [], [], []
        cone_rows: Dict[str, slice] = {}
        cursor = 0

        for name, expr in self._inequalities:
            rows = self._row(expr)
            g_parts.append(rows)
            h_parts.append(-expr.const)
            norms = np.linalg.norm(rows, axis=1) if equilibrate else np.ones(expr.rows)
            scales.append(np.where(norms > 0, 1.0 / np.where(norms > 0, norms, 1.0), 1.0))
            cone_rows[name] = slice(cursor, cursor + expr.rows)
            cursor += expr.rows
        l_dim = cursor

        q_dims = []
        for name, head, tail in self._cones:
            g_block = -self._row(Affine.stack([head, tail]))
            h_block = np.concatenate([head.const, tail.const])
            g_parts.append(g_block)
            h_parts.append(h_block)
            magnitude = max(np.abs(g_block).max(initial=0.0), np.abs(h_block).max(initial=0.0))
            block_scale = 1.0 / magnitude if equilibrate and magnitude > 0 else 1.0
            scales.append(np.full(g_block.shape[0], block_scale))
            cone_rows[name] = slice(cursor, cursor + g_block.shape[0])
            cursor += g_block.shape[0]
            q_dims.append(g_block.shape[0])

        s_dims = []
        for block in self.blocks.values():
            if block.kind != "hermitian":
                continue
            emb = embedding_matrix(block.dim)
            g_block = np.zeros((emb.shape[0], n))
            g_block[:, block.offset : block.offset + block.size] = -emb
            g_parts.append(g_block)
            h_parts.append(np.zeros(emb.shape[0]))
            scales.append(np.ones(emb.shape[0]))
            cone_rows[f"psd:{block.name}"] = slice(cursor, cursor + emb.shape[0])
            cursor += emb.shape[0]
            s_dims.append(2 * block.dim)

        G = np.vstack(g_parts) if g_parts else np.zeros((0, n))
        h = np.concatenate(h_parts) if h_parts else np.zeros(0)
        row_scale = np.concatenate(scales) if scales else np.zeros(0)

        a_parts, b_parts, eq_scales = [], [], []
        eq_rows: Dict[str, slice] = {}
        cursor = 0
        for name, expr in self._equalities:
            rows = self._row(expr)
            a_parts.append(rows)
            b_parts.append(-expr.const)
            norms = np.linalg.norm(rows, axis=1) if equilibrate else np.ones(expr.rows)
            eq_scales.append(np.where(norms > 0, 1.0 / np.where(norms > 0, norms, 1.0), 1.0))
            eq_rows[name] = slice(cursor, cursor + expr.rows)
            cursor += expr.rows
        A = np.vstack(a_parts) if a_parts else np.zeros((0, n))
        b = np.concatenate(b_parts) if b_parts else np.zeros(0)
        eq_scale = np.concatenate(eq_scales) if eq_scales else np.zeros(0)

        return StandardForm(
            c=c,
            G=G * row_scale[:, None],
            h=h * row_scale,
            A=A * eq_scale[:, None],
            b=b * eq_scale,
            dims=ConeDims(l=l_dim, q=tuple(q_dims), s=tuple(s_dims)),
            row_scale=row_scale,
            eq_scale=eq_scale,
            cone_rows=cone_rows,
            eq_rows=eq_rows,
            objective_sign=self._sense,
            objective_constant=objective_constant,
        )

    def interpret(self, std: StandardForm, raw: RawResult) -> ConicSolution:
        """Map a backend result back onto named blocks and constraints."""
        values: Dict[str, np.ndarray] = {}
        for block in self.blocks.values():
            chunk = raw.x[block.offset : block.offset + block.size]
            values[block.name] = (
                hermitian_from_params(chunk, block.dim) if block.kind == "hermitian" else chunk.copy()
            )
        z = raw.z * std.row_scale if raw.z.size else raw.z
        y = raw.y * std.eq_scale if raw.y.size else raw.y
        duals = {name: z[rows] for name, rows in std.cone_rows.items()}
        duals.update({name: y[rows] for name, rows in std.eq_rows.items()})
        objective = std.objective_sign * float(std.c @ raw.x) + std.objective_constant
        return ConicSolution(
            status=raw.status,
            values=values,
            duals=duals,
            objective=objective,
            kkt_residuals={
                "primal": raw.primal_residual,
                "dual": raw.dual_residual,
                "gap": raw.gap,
            },
            iterations=raw.iterations,
            message=raw.message,
        )

    def residuals(self, values: Dict[str, np.ndarray]) -> Dict[str, float]:
        """Largest violation per constraint at given block values (for checks)."""
        params = {
            name: hermitian_to_params(values[name]) if block.kind == "hermitian" else values[name]
            for name, block in self.blocks.items()
        }
        out: Dict[str, float] = {}
        for name, expr in self._equalities:
            out[name] = float(np.max(np.abs(expr.evaluate(params))))
        for name, expr in self._inequalities:
            out[name] = float(np.max(expr.evaluate(params)))
        for name, head, tail in self._cones:
            out[name] = float(np.linalg.norm(tail.evaluate(params)) - head.evaluate(params)[0])
        for name, block in self.blocks.items():
            if block.kind == "hermitian":
                out[f"psd:{name}"] = float(-linalg.eigvalsh(values[name])[0])
        return out


# =============================================================================
# CONE ALGEBRA
# =============================================================================


class _Cones:
    """Per-cone operations on vectors laid out as [orthant | SOCs | svec PSDs]."""

    def __init__(self, dims: ConeDims):
        self.dims = dims
        self.l = dims.l
        cursor = dims.l
        self.q_slices: List[slice] = []
        for d in dims.q:
            self.q_slices.append(slice(cursor, cursor + d))
            cursor += d
        self.s_slices: List[Tuple[int, slice]] = []
        for n in dims.s:
            self.s_slices.append((n, slice(cursor, cursor + svec_dim(n))))
            cursor += svec_dim(n)
        self.size = cursor
        self.degree = dims.degree

    def identity(self) -> np.ndarray:
        e = np.zeros(self.size)
        e[: self.l] = 1.0
        for sl in self.q_slices:
            e[sl.start] = 1.0
        for n, sl in self.s_slices:
            e[sl] = svec(np.eye(n))
        return e

    def min_eig(self, x: np.ndarray) -> float:
        values = [np.min(x[: self.l])] if self.l else []
        for sl in self.q_slices:
            values.append(x[sl.start] - np.linalg.norm(x[sl.start + 1 : sl.stop]))
        for n, sl in self.s_slices:
            values.append(linalg.eigvalsh(smat(x[sl], n))[0])
        return float(min(values)) if values else math.inf

    def is_interior(self, x: np.ndarray) -> bool:
        """Strict membership in the cone interior; NaN counts as outside."""
        if self.l and not np.all(x[: self.l] > 0.0):
            return False
        for sl in self.q_slices:
            if not x[sl.start] - np.linalg.norm(x[sl.start + 1 : sl.stop]) > 0.0:
                return False
        for n, sl in self.s_slices:
            block = smat(x[sl], n)
            if not np.all(np.isfinite(block)) or not linalg.eigvalsh(block)[0] > 0.0:
                return False
        return True

    def jordan(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        out = np.empty(self.size)
        out[: self.l] = u[: self.l] * v[: self.l]
        for sl in self.q_slices:
            uu, vv = u[sl], v[sl]
            out[sl.start] = uu @ vv
            out[sl.start + 1 : sl.stop] = uu[0] * vv[1:] + vv[0] * uu[1:]
        for n, sl in self.s_slices:
            um, vm = smat(u[sl], n), smat(v[sl], n)
            out[sl] = svec(0.5 * (um @ vm + vm @ um))
        return out


def _soc_max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Smallest positive root of (x0 + a dx0)^2 - ||x1 + a dx1||^2 = 0."""
    qa = dx[0] ** 2 - dx[1:] @ dx[1:]
    qb = 2.0 * (x[0] * dx[0] - x[1:] @ dx[1:])
    qc = x[0] ** 2 - x[1:] @ x[1:]
    roots = []
    if abs(qa) <= 1e-300:
        if qb < 0:
            roots.append(-qc / qb)
    else:
        disc = qb * qb - 4.0 * qa * qc
        if disc >= 0:
            q = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
            if q != 0.0:
                roots.extend([q / qa, qc / q])
            else:
                roots.append(-qb / (2.0 * qa))
    positive = [r for r in roots if r > 0]
    step = min(positive) if positive else math.inf
    if dx[0] < 0:
        step = min(step, -x[0] / dx[0])
    return step


class _Scaling:
    """
    Nesterov-Todd scaling W with W z = W^{-T} s = lambda.

    Orthant: W = diag(sqrt(s/z)). SOC: W = beta * (hyperbolic Householder).
    PSD: W(U) = R^T U R with R = L_s V Lambda^{-1/2}, from the SVD of L_z^T L_s;
    the factors L L^T = S come from clipped eigendecompositions.
    """

    def __init__(self, cones: _Cones, s: np.ndarray, z: np.ndarray):
        self.cones = cones
        l = cones.l
        lam = np.empty(cones.size)
        self.orth = np.sqrt(s[:l] / z[:l])
        lam[:l] = np.sqrt(s[:l] * z[:l])

        self.soc: List[Tuple[float, np.ndarray]] = []
        for sl in cones.q_slices:
            ss, zz = s[sl], z[sl]
            s_norm, z_norm = _soc_norm(ss), _soc_norm(zz)
            s_bar, z_bar = ss / s_norm, zz / z_norm
            gamma = math.sqrt(0.5 * (1.0 + s_bar @ z_bar))
            j_zbar = np.concatenate([[z_bar[0]], -z_bar[1:]])
            w_bar = (s_bar + j_zbar) / (2.0 * gamma)
            beta = math.sqrt(s_norm / z_norm)
            self.soc.append((beta, w_bar))
            lam[sl] = beta * _hyperbolic(w_bar, zz[:, None])[:, 0]

        self.psd: List[Tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        for n, sl in cones.s_slices:
            chol_s = _psd_factor(smat(s[sl], n))
            chol_z = _psd_factor(smat(z[sl], n))
            u, sv, vt = linalg.svd(chol_z.T @ chol_s)
            sv = np.maximum(sv, np.finfo(float).tiny)
            root = np.sqrt(sv)
            r = (chol_s @ vt.T) / root[None, :]
            r_inv_t = (chol_z @ u) / root[None, :]
            self.psd.append((r, r_inv_t, sv))
            lam[sl] = svec(np.diag(sv))
        self.lam = lam

    def max_step(self, d: np.ndarray) -> float:
        """
        Largest alpha with lambda + alpha d in the cone (inf if unbounded).

        d is a scaled direction (W^{-T} ds or W dz); lambda + alpha d stays in
        the cone exactly when the unscaled iterate does.
        """
        lam = self.lam
        l = self.cones.l
        alpha = math.inf
        if l:
            neg = d[:l] < 0
            if np.any(neg):
                alpha = min(alpha, float(np.min(-lam[:l][neg] / d[:l][neg])))
        for sl in self.cones.q_slices:
            alpha = min(alpha, _soc_max_step(lam[sl], d[sl]))
        for (_, _, sv), (n, sl) in zip(self.psd, self.cones.s_slices):
            root = np.sqrt(sv)
            scaled = smat(d[sl], n) / np.outer(root, root)
            low = float(linalg.eigvalsh(scaled)[0])
            if low < 0:
                alpha = min(alpha, -1.0 / low)
        return alpha

    def apply(self, u: np.ndarray, kind: str) -> np.ndarray:
        """Apply W, W^T, W^{-1} or W^{-T} ('W', 'Wt', 'Winv', 'WinvT') column-wise."""
        vector = u.ndim == 1
        mat = u[:, None] if vector else u
        out = np.empty_like(mat, dtype=float)
        l = self.cones.l
        inverse = kind in ("Winv", "WinvT")
        out[:l] = mat[:l] / self.orth[:, None] if inverse else mat[:l] * self.orth[:, None]

        for (beta, w_bar), sl in zip(self.soc, self.cones.q_slices):
            block = mat[sl]
            if inverse:
                flipped = block.copy()
                flipped[1:] *= -1.0
                res = _hyperbolic(w_bar, flipped)
                res[1:] *= -1.0
                out[sl] = res / beta
            else:
                out[sl] = beta * _hyperbolic(w_bar, block)

        for (r, r_inv_t, _), (n, sl) in zip(self.psd, self.cones.s_slices):
            left = {"W": r.T, "Wt": r, "Winv": r_inv_t, "WinvT": r_inv_t.T}[kind]
            mats = smat(mat[sl].T, n)
            out[sl] = svec(left @ mats @ left.T).T
        return out[:, 0] if vector else out

    def lam_div(self, rhs: np.ndarray) -> np.ndarray:
        """Solve lambda o u = rhs for u."""
        lam = self.lam
        out = np.empty_like(rhs)
        l = self.cones.l
        out[:l] = rhs[:l] / lam[:l]
        for sl in self.cones.q_slices:
            lv, rv = lam[sl], rhs[sl]
            det = lv[0] ** 2 - lv[1:] @ lv[1:]
            u0 = (lv[0] * rv[0] - lv[1:] @ rv[1:]) / det
            out[sl.start] = u0
            out[sl.start + 1 : sl.stop] = (rv[1:] - u0 * lv[1:]) / lv[0]
        for (_, _, sv), (n, sl) in zip(self.psd, self.cones.s_slices):
            rows, cols, _ = _svec_layout(n)
            out[sl] = rhs[sl] * 2.0 / (sv[rows] + sv[cols])
        return out


def _soc_norm(x: np.ndarray) -> float:
    """sqrt(x0^2 - ||x1||^2), factored to keep precision near the boundary."""
    tail = float(np.linalg.norm(x[1:]))
    det = (x[0] - tail) * (x[0] + tail)
    if not det > 0.0:
        raise np.linalg.LinAlgError("iterate left the second-order cone interior")
    return math.sqrt(det)


def _psd_factor(mat: np.ndarray) -> np.ndarray:
    """F with F F^T = mat, eigenvalues clipped to a tiny positive floor."""
    eigvals, eigvecs = linalg.eigh(mat)
    top = float(eigvals[-1])
    if not top > 0.0:
        raise np.linalg.LinAlgError("iterate left the semidefinite cone interior")
    floor = max(top * 1e-300, np.finfo(float).tiny)
    return eigvecs * np.sqrt(np.maximum(eigvals, floor))[None, :]


def _hyperbolic(w_bar: np.ndarray, u: np.ndarray) -> np.ndarray:
    """[[w0, w1^T], [w1, I + w1 w1^T/(1 + w0)]] @ u for a 2-D u."""
    w0, w1 = w_bar[0], w_bar[1:]
    u0, u1 = u[0], u[1:]
    proj = w1 @ u1
    out = np.empty_like(u, dtype=float)
    out[0] = w0 * u0 + proj
    out[1:] = np.outer(w1, u0) + u1 + np.outer(w1, proj) / (1.0 + w0)
    return out


class _KktSolver:
    """Factorization of [[Gs^T Gs, A^T], [A, 0]] with one refinement sweep."""

    def __init__(self, gs: np.ndarray, a: np.ndarray, regularization: float = 1e-13):
        n, p = gs.shape[1], a.shape[0]
        top = gs.T @ gs
        matrix = np.zeros((n + p, n + p))
        matrix[:n, :n] = top
        matrix[:n, n:] = a.T
        matrix[n:, :n] = a
        delta = regularization * max(1.0, float(np.max(np.abs(np.diag(top)), initial=0.0)))
        regularized = matrix.copy()
        regularized[:n, :n] += delta * np.eye(n)
        regularized[n:, n:] -= delta * np.eye(p)
        self.n = n
        self.matrix = matrix
        self.lu = linalg.lu_factor(regularized, check_finite=False)
        if not np.all(np.isfinite(self.lu[0])):
            raise np.linalg.LinAlgError("KKT factorization failed")

    def solve(self, rx: np.ndarray, ry: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        rhs = np.concatenate([rx, ry])
        sol = linalg.lu_solve(self.lu, rhs, check_finite=False)
        for _ in range(2):
            sol = sol + linalg.lu_solve(self.lu, rhs - self.matrix @ sol, check_finite=False)
        if not np.all(np.isfinite(sol)):
            raise np.linalg.LinAlgError("KKT solve produced non-finite values")
        return sol[: self.n], sol[self.n :]


# =============================================================================
# INTERIOR-POINT METHOD
# =============================================================================


_MU_BACKOFF = 1e-8
_LATE_STEP_FRACTION = 0.95
_MAX_BACKTRACKS = 60


def _shift_interior(cones: _Cones, x: np.ndarray) -> np.ndarray:
    low = cones.min_eig(x)
    if low <= 1e-8 * max(float(np.linalg.norm(x)), 1.0):
        return x + (1.0 - low) * cones.identity()
    return x


def interior_point_solve(std: StandardForm, options: Optional[SolverOptions] = None) -> RawResult:
    """
    Homogeneous self-dual embedding:

        A^T y + G^T z + c tau = 0,   A x = b tau,   G x + s = h tau,
        kappa = -c^T x - b^T y - h^T z,   (s, z) in K x K,  tau, kappa >= 0.

    Terminates with an optimal point (residuals <= feastol, gap <= abstol or
    relative gap <= reltol), a primal infeasibility certificate
    (h^T z + b^T y < 0 with small ||A^T y + G^T z||), an unboundedness
    certificate, or at max_iters.

    Steps are ratio-tested in the scaled space, then halved until s and z
    are strictly interior. If the loop stops on max_iters or a numerical
    failure, the iterate with the smallest max(pres, dres, gap) is returned
    as optimal_inaccurate when that value is within inaccurate_tol.
    """
    opts = options or SolverOptions()
    c, G, h, A, b = std.c, std.G, std.h, std.A, std.b
    n, p = c.size, b.size
    cones = _Cones(std.dims)
    e = cones.identity()

    resx0 = max(1.0, float(np.linalg.norm(c)))
    resy0 = max(1.0, float(np.linalg.norm(b)))
    resz0 = max(1.0, float(np.linalg.norm(h)))

    try:
        kkt = _KktSolver(G, A)
        x, _ = kkt.solve(G.T @ h, b)
        s = _shift_interior(cones, h - G @ x)
        xd, y = kkt.solve(-c, np.zeros(p))
        z = _shift_interior(cones, G @ xd)
    except (np.linalg.LinAlgError, ValueError) as e_init:
        return RawResult(
            status=ConicStatus.NUMERICAL_FAILURE,
            x=np.zeros(n), y=np.zeros(p), z=np.zeros(h.size), s=np.zeros(h.size),
            message=f"initialization failed: {e_init}",
        )

    tau, kappa = 1.0, 1.0
    status = ConicStatus.MAX_ITERS
    pres = dres = gap_abs = pinfres = math.inf
    message = ""
    iteration = 0
    mu0 = math.inf
    best: Optional[Tuple[float, Tuple[Any, ...]]] = None

    for iteration in range(opts.max_iters + 1):
        rx = A.T @ y + G.T @ z + c * tau
        ry = A @ x - b * tau
        rz = G @ x + s - h * tau
        rt = kappa + c @ x + b @ y + h @ z
        sz = float(s @ z)
        mu = (sz + tau * kappa) / (cones.degree + 1)
        if iteration == 0:
            mu0 = mu

        pcost = float(c @ x) / tau
        dcost = -float(h @ z + b @ y) / tau
        gap_abs = sz / tau**2
        if pcost < 0:
            relgap = gap_abs / -pcost
        elif dcost > 0:
            relgap = gap_abs / dcost
        else:
            relgap = math.inf
        pres = max(float(np.linalg.norm(ry)) / resy0, float(np.linalg.norm(rz)) / resz0) / tau
        dres = float(np.linalg.norm(rx)) / resx0 / tau

        logger.debug(
            f"ipm {iteration:3d}: pcost={pcost:.8e} dcost={dcost:.8e} gap={gap_abs:.2e} "
            f"pres={pres:.2e} dres={dres:.2e} tau={tau:.2e} kappa={kappa:.2e}"
        )

        merit = max(pres, dres, min(relgap, gap_abs))
        if best is None or merit < best[0]:
            best = (merit, (x, y, z, s, tau, kappa, pres, dres, gap_abs))

        if pres <= opts.feastol and dres <= opts.feastol and (
            gap_abs <= opts.abstol or relgap <= opts.reltol
        ):
            status = ConicStatus.OPTIMAL
            break

        hz_by = float(h @ z + b @ y)
        pinfres = math.inf
        if hz_by < 0:
            pinfres = float(np.linalg.norm(A.T @ y + G.T @ z)) / resx0 / -hz_by
            if pinfres <= opts.feastol:
                status = ConicStatus.INFEASIBLE_CERTIFICATE
                break
        cx = float(c @ x)
        if cx < 0:
            dinfres = max(
                float(np.linalg.norm(A @ x)) / resy0, float(np.linalg.norm(G @ x + s)) / resz0
            ) / -cx
            if dinfres <= opts.feastol:
                status = ConicStatus.UNBOUNDED
                break

        if iteration == opts.max_iters:
            break

        try:
            scaling = _Scaling(cones, s, z)
            gs = scaling.apply(G, "WinvT")
            kkt = _KktSolver(gs, A)
            h_scaled = scaling.apply(h, "WinvT")
            dx2, dy2 = kkt.solve(gs.T @ h_scaled - c, b)
            dz2 = scaling.apply(scaling.apply(G @ dx2 - h, "WinvT"), "Winv")
            tau_coeff = -kappa / tau + float(c @ dx2 + b @ dy2 + h @ dz2)
            lam = scaling.lam

            def newton(rhs_cone: np.ndarray, rhs_tau: float, eta: float):
                u = scaling.lam_div(rhs_cone)
                rho_z = eta * rz + scaling.apply(u, "Wt")
                dx1, dy1 = kkt.solve(-eta * rx - gs.T @ scaling.apply(rho_z, "WinvT"), -eta * ry)
                dz1 = scaling.apply(scaling.apply(G @ dx1 + rho_z, "WinvT"), "Winv")
                dtau = (
                    -eta * rt - rhs_tau / tau - float(c @ dx1 + b @ dy1 + h @ dz1)
                ) / tau_coeff
                dx = dx1 + dtau * dx2
                dy = dy1 + dtau * dy2
                dz = dz1 + dtau * dz2
                w_dz = scaling.apply(dz, "W")
                ds = scaling.apply(u - w_dz, "Wt")
                dkappa = (rhs_tau - kappa * dtau) / tau
                return dx, dy, dz, ds, dtau, dkappa, u - w_dz, w_dz

            def step_to_boundary(scaled_ds, scaled_dz, dtau, dkappa) -> float:
                alpha = min(scaling.max_step(scaled_ds), scaling.max_step(scaled_dz))
                if dtau < 0:
                    alpha = min(alpha, -tau / dtau)
                if dkappa < 0:
                    alpha = min(alpha, -kappa / dkappa)
                return alpha

            lam_sq = cones.jordan(lam, lam)
            aff = newton(-lam_sq, -tau * kappa, 1.0)
            alpha_aff = min(1.0, step_to_boundary(aff[6], aff[7], aff[4], aff[5]))
            sigma = (1.0 - alpha_aff) ** 3

            corrector = cones.jordan(aff[6], aff[7])
            rhs_cone = -lam_sq + sigma * mu * e - corrector
            rhs_tau = -tau * kappa + sigma * mu - aff[4] * aff[5]
            dx, dy, dz, ds, dtau, dkappa, scaled_ds, scaled_dz = newton(
                rhs_cone, rhs_tau, 1.0 - sigma
            )
            fraction = opts.step_fraction
            if mu <= _MU_BACKOFF * mu0:
                fraction = min(fraction, _LATE_STEP_FRACTION)
            alpha = min(1.0, fraction * step_to_boundary(scaled_ds, scaled_dz, dtau, dkappa))

            # rounding in s + alpha ds can still cross the boundary
            for _ in range(_MAX_BACKTRACKS):
                if (
                    tau + alpha * dtau > 0.0
                    and kappa + alpha * dkappa > 0.0
                    and cones.is_interior(s + alpha * ds)
                    and cones.is_interior(z + alpha * dz)
                ):
                    break
                alpha *= 0.5
            else:
                raise np.linalg.LinAlgError("no step keeps the iterate interior")
        except (np.linalg.LinAlgError, ValueError) as e_step:
            status = ConicStatus.NUMERICAL_FAILURE
            message = f"iteration {iteration}: {e_step}"
            break

        if alpha < 1e-12:
            status = ConicStatus.NUMERICAL_FAILURE
            message = f"iteration {iteration}: step length collapsed"
            break

        x = x + alpha * dx
        y = y + alpha * dy
        z = z + alpha * dz
        s = s + alpha * ds
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkappa

    if status in (ConicStatus.MAX_ITERS, ConicStatus.NUMERICAL_FAILURE):
        if best is not None and best[0] <= opts.inaccurate_tol:
            x, y, z, s, tau, kappa, pres, dres, gap_abs = best[1]
            logger.debug(f"ipm: {status.value} after {iteration} iterations, best iterate kept")
            status = ConicStatus.OPTIMAL_INACCURATE
        elif pinfres <= opts.inaccurate_tol and kappa > tau:
            status = ConicStatus.INFEASIBLE_CERTIFICATE

    if status in (ConicStatus.INFEASIBLE_CERTIFICATE, ConicStatus.UNBOUNDED):
        scale = 1.0
    else:
        scale = 1.0 / tau
    return RawResult(
        status=status,
        x=x * scale,
        y=y * scale,
        z=z * scale,
        s=s * scale,
        iterations=iteration,
        primal_residual=pres,
        dual_residual=dres,
        gap=gap_abs,
        message=message,
    )


# =============================================================================
# BACKENDS
# =============================================================================


class BaseConicBackend(ABC):
    """Solves standard-form conic problems."""

    name = "base"

    def __init__(self, options: Optional[SolverOptions] = None):
        self.options = options or SolverOptions()

    @abstractmethod
    def solve_standard(self, std: StandardForm) -> RawResult:
        """Solve a compiled problem."""

    def solve(self, problem: ConicProblem, dump_path: Optional[Path] = None) -> ConicSolution:
        std = problem.compile(equilibrate=self.options.equilibrate)
        if dump_path is not None:
            dump_problem(std, dump_path)
        raw = self.solve_standard(std)
        solution = problem.interpret(std, raw)
        if not solution.status.has_solution:
            logger.debug(f"{problem.name}: {self.name} returned {solution.status.value}")
        return solution


class InteriorPointBackend(BaseConicBackend):
    """The internal homogeneous self-dual interior-point method."""

    name = "interior_point"

    def solve_standard(self, std: StandardForm) -> RawResult:
        return interior_point_solve(std, self.options)


class CvxpyBackend(BaseConicBackend):
    """
    Cross-validation backend rebuilding the standard form in cvxpy.

    Duals come from the cvxpy constraints; dual residual and gap are
    evaluated on them and are NaN when the solver reports no duals.
    """

    name = "cvxpy"

    def __init__(self, options: Optional[SolverOptions] = None, solver: Optional[str] = None):
        super().__init__(options)
        try:
            import cvxpy  # noqa: F401
        except ImportError as e:
            raise ImportError("cvxpy is required for the cvxpy backend: pip install cvxpy") from e
        self.solver = solver

    def solve_standard(self, std: StandardForm) -> RawResult:
        import cvxpy as cp

        n = std.c.size
        cones = _Cones(std.dims)
        x = cp.Variable(n)
        slack = std.h - std.G @ x
        equality = std.A @ x == std.b if std.b.size else None
        # (constraint, z rows, psd size or 0) in z order
        cone_constraints: List[Tuple[Any, slice, int]] = []
        if cones.l:
            cone_constraints.append((slack[: cones.l] >= 0, slice(0, cones.l), 0))
        for sl in cones.q_slices:
            cone_constraints.append(
                (cp.SOC(slack[sl.start], slack[sl.start + 1 : sl.stop]), sl, 0)
            )
        for size, sl in cones.s_slices:
            unpack = smat(np.eye(svec_dim(size)), size).reshape(svec_dim(size), -1).T
            cone_constraints.append(
                (cp.reshape(unpack @ slack[sl], (size, size), order="C") >> 0, sl, size)
            )
        constraints = [con for con, _, _ in cone_constraints]
        if equality is not None:
            constraints.append(equality)

        prob = cp.Problem(cp.Minimize(std.c @ x), constraints)
        try:
            prob.solve(solver=self.solver)
        except cp.error.SolverError as e:
            return RawResult(
                status=ConicStatus.NUMERICAL_FAILURE,
                x=np.zeros(n), y=np.zeros(std.b.size), z=np.zeros(std.h.size),
                s=np.zeros(std.h.size), message=str(e),
            )

        status_map = {
            cp.OPTIMAL: ConicStatus.OPTIMAL,
            cp.OPTIMAL_INACCURATE: ConicStatus.OPTIMAL_INACCURATE,
            cp.INFEASIBLE: ConicStatus.INFEASIBLE_CERTIFICATE,
            cp.INFEASIBLE_INACCURATE: ConicStatus.INFEASIBLE_CERTIFICATE,
            cp.UNBOUNDED: ConicStatus.UNBOUNDED,
            cp.UNBOUNDED_INACCURATE: ConicStatus.UNBOUNDED,
        }
        status = status_map.get(prob.status, ConicStatus.NUMERICAL_FAILURE)
        x_val = np.asarray(x.value, dtype=float) if x.value is not None else np.zeros(n)
        s_val = std.h - std.G @ x_val
        pres = max(
            float(np.linalg.norm(std.A @ x_val - std.b)) if std.b.size else 0.0,
            max(0.0, -cones.min_eig(s_val)) if s_val.size else 0.0,
        )

        z = np.full(std.h.size, math.nan)
        for con, sl, size in cone_constraints:
            z[sl] = _cvxpy_dual(con.dual_value, size, sl.stop - sl.start)
        y = np.full(std.b.size, math.nan)
        if equality is not None:
            y = _cvxpy_dual(equality.dual_value, 0, std.b.size)

        # NaN duals (solver without dual output) propagate into both residuals
        dres = float(np.linalg.norm(std.A.T @ y + std.G.T @ z + std.c)) / max(
            1.0, float(np.linalg.norm(std.c))
        )
        gap = abs(float(std.c @ x_val + std.h @ z + std.b @ y))
        return RawResult(
            status=status,
            x=x_val,
            y=y,
            z=z,
            s=s_val,
            primal_residual=pres,
            dual_residual=dres,
            gap=gap,
        )


def _cvxpy_dual(value: Any, psd_size: int, length: int) -> np.ndarray:
    """Flatten a cvxpy dual value onto z/y rows; NaN when the solver gave none."""
    if value is None:
        return np.full(length, math.nan)
    if psd_size:
        mat = np.asarray(value, dtype=float).reshape(psd_size, psd_size)
        return svec(0.5 * (mat + mat.T))
    if isinstance(value, (list, tuple)):
        parts = [np.atleast_1d(np.asarray(part, dtype=float)).ravel() for part in value]
        return np.concatenate(parts)
    return np.atleast_1d(np.asarray(value, dtype=float)).ravel()


def create_backend(
    backend_type: Optional[str] = None,
    config: Optional[Dict[str, Any]] = None,
    **kwargs: Any,
) -> BaseConicBackend:
    """
    Factory function to create conic backends.

    Args:
        backend_type: "interior_point" or "cvxpy" (default: config `conic.backend`)
        config: Optional configuration dictionary (loaded from config.yaml if not provided)
        **kwargs: Option overrides (e.g. max_iters=100) or `solver` for cvxpy

    Example:
        backend = create_backend("interior_point", max_iters=50)
    """
    backends: Dict[str, type] = {
        "interior_point": InteriorPointBackend,
        "cvxpy": CvxpyBackend,
    }
    if config is None:
        from settings import load_config

        config = load_config()
    if backend_type is None:
        backend_type = config.get("conic", {}).get("backend", "interior_point")
    if backend_type not in backends:
        raise ValueError(f"Unknown backend: {backend_type}. Available: {list(backends.keys())}")

    options = SolverOptions.from_config(config)
    for key in list(kwargs):
        if hasattr(options, key):
            setattr(options, key, kwargs.pop(key))
    if backend_type == "cvxpy":
        return CvxpyBackend(options, solver=kwargs.get("solver"))
    return InteriorPointBackend(options)


def solve(
    problem: ConicProblem,
    opts: Optional[SolverOptions] = None,
    backend: Optional[BaseConicBackend] = None,
    dump_path: Optional[Path] = None,
) -> ConicSolution:
    """Solve with the given backend (internal interior-point method by default)."""
    if backend is None:
        backend = InteriorPointBackend(opts)
    return backend.solve(problem, dump_path=dump_path)


# =============================================================================
# PROBLEM DUMP
# =============================================================================


def _write_triplets(lines: List[str], name: str, mat: np.ndarray) -> None:
    rows, cols = np.nonzero(mat)
    lines.append(f"[{name}] {mat.shape[0]} {mat.shape[1]} {rows.size}")
    lines.extend(f"{i} {j} {mat[i, j]:.17g}" for i, j in zip(rows, cols))


def _write_vector(lines: List[str], name: str, vec: np.ndarray) -> None:
    idx = np.nonzero(vec)[0]
    lines.append(f"[{name}] {vec.size} {idx.size}")
    lines.extend(f"{i} {vec[i]:.17g}" for i in idx)


def dump_problem(std: StandardForm, path: Path) -> None:
    """
    Write a standard-form problem as sparse triplet sections.

    Sections: [dims] l / q sizes / s orders, then [c], [G], [h], [A], [b]
    with zero-based "row col value" or "index value" lines.
    """
    lines = [
        "# min c'x  s.t.  Gx + s = h, Ax = b, s in K",
        "[dims]",
        f"l {std.dims.l}",
        "q " + " ".join(str(d) for d in std.dims.q),
        "s " + " ".join(str(d) for d in std.dims.s),
    ]
    _write_vector(lines, "c", std.c)
    _write_triplets(lines, "G", std.G)
    _write_vector(lines, "h", std.h)
    _write_triplets(lines, "A", std.A)
    _write_vector(lines, "b", std.b)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Conic problem written to {path}")
