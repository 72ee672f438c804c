"""Flattens a hub model over its hourly horizon into a sparse linear program.

Variable layout is deterministic: nodes in model order, sizing variables
first, then the hour-indexed blocks.  Storage inventories and ramp limits
wrap cyclically (hour T-1 connects back to hour 0) so no free energy can be
extracted from the horizon boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
import scipy.sparse as sp

from .model import (
    ConversionNode,
    DemandNode,
    HubModel,
    SourceNode,
    StorageNode,
    TransportNode,
    annuity_factor,
    validate_model,
)
from .profiles import ProfileSet

LE, EQ, GE = -1, 0, 1
INF = float("inf")


class CompileError(ValueError):
    """Raised when a model cannot be lowered to a linear program."""


class ExportError(ValueError):
    """Raised when an LP cannot be serialized to text."""


@dataclass(frozen=True)
class VarKey:
    """Identity of one column: a node, one of its variables, and an hour
    index (None for sizing variables)."""

    node: str
    var: str
    t: Optional[int] = None


class VariableMap:
    """Bijection between variable keys and column indices."""

    def __init__(self) -> None:
        self.keys: list[VarKey] = []
        self._index: dict[VarKey, int] = {}

    def add(self, key: VarKey) -> int:
        if key in self._index:
            raise CompileError(f"duplicate variable {key}")
        idx = len(self.keys)
        self.keys.append(key)
        self._index[key] = idx
        return idx

    def index(self, key: VarKey) -> int:
        return self._index[key]

    def get(self, key: VarKey) -> Optional[int]:
        return self._index.get(key)

    def __len__(self) -> int:
        return len(self.keys)

    def __contains__(self, key: VarKey) -> bool:
        return key in self._index


class LinearProgram:
    """min c'x + const  s.t.  A x {<=,=,>=} b,  lo <= x <= hi (sparse)."""

    def __init__(self, obj: np.ndarray, obj_const: float, matrix: sp.csr_matrix,
                 senses: np.ndarray, rhs: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                 varmap: VariableMap, row_blocks: list[tuple[tuple, int, int]]):
        self.obj = obj
        self.obj_const = obj_const
        self.matrix = matrix
        self.senses = senses
        self.rhs = rhs
        self.lo = lo
        self.hi = hi
        self.varmap = varmap
        self.row_blocks = row_blocks

    @property
    def ncols(self) -> int:
        return self.obj.size

    @property
    def nrows(self) -> int:
        return self.rhs.size

    def column(self, node: str, var: str, t: Optional[int] = None) -> int:
        return self.varmap.index(VarKey(node, var, t))

    def row_tag(self, row: int) -> tuple:
        for tag, start, count in self.row_blocks:
            if start <= row < start + count:
                return tag
        raise IndexError(row)

    def rows_tagged(self, kind: str) -> list[int]:
        out: list[int] = []
        for tag, start, count in self.row_blocks:
            if tag[0] == kind:
                out.extend(range(start, start + count))
        return out

    def check_well_formed(self) -> None:
        """Structural sanity: finite rhs, ordered bounds, merged entries."""
        if not np.all(np.isfinite(self.rhs)):
            raise CompileError("non-finite right-hand side")
        if np.any(self.lo > self.hi):
            raise CompileError("lower bound above upper bound")
        coo = self.matrix.tocoo()
        seen = set(zip(coo.row.tolist(), coo.col.tolist()))
        if len(seen) != coo.nnz:
            raise CompileError("duplicate (row, col) entries")


class _Builder:
    def __init__(self) -> None:
        self.varmap = VariableMap()
        self.lo: list[float] = []
        self.hi: list[float] = []
        self.obj: list[float] = []
        self._rows: list[np.ndarray] = []
        self._cols: list[np.ndarray] = []
        self._vals: list[np.ndarray] = []
        self.senses: list[np.ndarray] = []
        self.rhs: list[np.ndarray] = []
        self.row_blocks: list[tuple[tuple, int, int]] = []
        self.nrows = 0

    def add_var(self, key: VarKey, lo: float = 0.0, hi: float = INF, obj: float = 0.0) -> int:
        if lo > hi:
            raise CompileError(f"variable {key}: lower bound {lo} above upper bound {hi}")
        idx = self.varmap.add(key)
        self.lo.append(lo)
        self.hi.append(hi)
        self.obj.append(obj)
        return idx

    def add_var_block(self, node: str, var: str, count: int,
                      lo: float = 0.0, hi: float = INF, obj: float = 0.0) -> int:
        """Add ``count`` hour-indexed variables, returning the base column."""
        base = self.add_var(VarKey(node, var, 0), lo, hi, obj)
        for t in range(1, count):
            self.add_var(VarKey(node, var, t), lo, hi, obj)
        return base

    def add_row(self, tag: tuple, sense: int, rhs: float,
                cols: Iterable[int], vals: Iterable[float]) -> None:
        cols = np.asarray(list(cols), dtype=np.int64)
        vals = np.asarray(list(vals), dtype=np.float64)
        self._rows.append(np.full(cols.size, self.nrows, dtype=np.int64))
        self._cols.append(cols)
        self._vals.append(vals)
        self.senses.append(np.array([sense], dtype=np.int8))
        self.rhs.append(np.array([rhs], dtype=np.float64))
        self.row_blocks.append((tag, self.nrows, 1))
        self.nrows += 1

    def add_row_block(self, tag: tuple, sense: int, rhs: float | np.ndarray,
                      terms: list[tuple[np.ndarray, float | np.ndarray]]) -> None:
        """Add one row per entry of the term column arrays.

        Every term contributes one coefficient per row: term ``(cols, coefs)``
        puts ``coefs[i]`` (or the scalar) at ``(row_i, cols[i])``.
        """
        count = terms[0][0].size
        if count == 0:
            return
        rows = np.arange(self.nrows, self.nrows + count, dtype=np.int64)
        for cols, coefs in terms:
            self._rows.append(rows)
            self._cols.append(np.asarray(cols, dtype=np.int64))
            if np.isscalar(coefs):
                self._vals.append(np.full(count, coefs, dtype=np.float64))
            else:
                self._vals.append(np.asarray(coefs, dtype=np.float64))
        self.senses.append(np.full(count, sense, dtype=np.int8))
        if np.isscalar(rhs):
            self.rhs.append(np.full(count, rhs, dtype=np.float64))
        else:
            self.rhs.append(np.asarray(rhs, dtype=np.float64))
        self.row_blocks.append((tag, self.nrows, count))
        self.nrows += count

    def build(self, obj_const: float = 0.0) -> LinearProgram:
        n = len(self.varmap)
        if self._rows:
            rows = np.concatenate(self._rows)
            cols = np.concatenate(self._cols)
            vals = np.concatenate(self._vals)
        else:
            rows = np.zeros(0, dtype=np.int64)
            cols = np.zeros(0, dtype=np.int64)
            vals = np.zeros(0, dtype=np.float64)
        matrix = sp.coo_matrix((vals, (rows, cols)), shape=(self.nrows, n)).tocsr()
        matrix.sum_duplicates()
        senses = np.concatenate(self.senses) if self.senses else np.zeros(0, dtype=np.int8)
        rhs = np.concatenate(self.rhs) if self.rhs else np.zeros(0, dtype=np.float64)
        return LinearProgram(
            obj=np.asarray(self.obj, dtype=np.float64), obj_const=obj_const,
            matrix=matrix, senses=senses, rhs=rhs,
            lo=np.asarray(self.lo, dtype=np.float64), hi=np.asarray(self.hi, dtype=np.float64),
            varmap=self.varmap, row_blocks=self.row_blocks,
        )


#: LP variable name of each node port, per hour.
PORT_VARS = {
    ("source", "out"): "gen",
    ("conversion", "out"): "out",
    ("storage", "charge"): "charge",
    ("storage", "discharge"): "discharge",
    ("transport", "in"): "in",
    ("transport", "out"): "out",
    ("demand", "in"): "delivered",
}


def port_var(node, port: str) -> str:
    """LP variable backing a (node, port) pair."""
    name = PORT_VARS.get((node.kind, port))
    if name is not None:
        return name
    if port.startswith(("in_", "out_", "aux_")):
        return port
    raise CompileError(f"node {node.name} has no port '{port}'")


def _annualized_unit_cost(econ) -> float:
    return annuity_factor(econ.wacc, econ.lifetime) * econ.capex + econ.fom


def compile_model(model: HubModel, profiles: ProfileSet) -> LinearProgram:
    """Lower a validated model plus capacity-factor profiles to an LP.

    Raises CompileError if the model has validation errors (warnings such
    as a missing producer are allowed: they surface as infeasibility) or if
    the profiles do not cover the horizon.
    """
    report = validate_model(model)
    if not report.is_valid:
        first = report.errors[0]
        raise CompileError(f"model invalid: {first.message} ({len(report.errors)} error(s))")
    T = model.horizon.hours
    if not profiles.covers(T):
        raise CompileError(f"profiles cover {profiles.hours} hours, horizon needs {T}")
    years = float(model.horizon.years)
    b = _Builder()
    ts = np.arange(T)
    nxt = (ts + 1) % T  # cyclic successor

    for n in model.nodes:
        name = n.name
        if isinstance(n, SourceNode):
            cap = None if n.economics.is_free else b.add_var(
                VarKey(name, "cap"), obj=years * _annualized_unit_cost(n.economics))
            gen = b.add_var_block(name, "gen", T, obj=n.economics.vom)
            if cap is not None:
                cf = profiles.series(n.profile_key, T)
                b.add_row_block(("avail", name), LE, 0.0,
                                [(gen + ts, 1.0), (np.full(T, cap), -cf)])
        elif isinstance(n, ConversionNode):
            cap = b.add_var(VarKey(name, "cap"), obj=years * _annualized_unit_cost(n.economics))
            out = b.add_var_block(name, "out", T, obj=n.economics.vom)
            capcol = np.full(T, cap)
            b.add_row_block(("cap", name), LE, 0.0, [(out + ts, 1.0), (capcol, -1.0)])
            if n.min_level > 0:
                b.add_row_block(("minlevel", name), GE, 0.0,
                                [(out + ts, 1.0), (capcol, -n.min_level)])
            if n.ramp < 1.0 and T > 1:
                b.add_row_block(("ramp_up", name), LE, 0.0,
                                [(out + nxt, 1.0), (out + ts, -1.0), (capcol, -n.ramp)])
                b.add_row_block(("ramp_dn", name), LE, 0.0,
                                [(out + ts, 1.0), (out + nxt, -1.0), (capcol, -n.ramp)])
            for f in n.factors:
                var = f"{f.direction}_{f.commodity}"
                col = b.add_var_block(name, var, T)
                b.add_row_block(("factor", name, var), EQ, 0.0,
                                [(col + ts, 1.0), (out + ts, -f.coeff)])
        elif isinstance(n, StorageNode):
            flow_cap = b.add_var(VarKey(name, "flow_cap"),
                                 obj=years * _annualized_unit_cost(n.flow_economics))
            stock_cap = b.add_var(VarKey(name, "stock_cap"),
                                  obj=years * _annualized_unit_cost(n.stock_economics))
            vom = n.flow_economics.vom + n.stock_economics.vom
            charge = b.add_var_block(name, "charge", T)
            discharge = b.add_var_block(name, "discharge", T, obj=vom)
            inv = b.add_var_block(name, "inventory", T)
            b.add_row_block(("storage_dyn", name), EQ, 0.0,
                            [(inv + nxt, 1.0), (inv + ts, -(1.0 - n.self_discharge)),
                             (charge + ts, -n.charge_eff), (discharge + ts, 1.0 / n.discharge_eff)])
            fcol = np.full(T, flow_cap)
            scol = np.full(T, stock_cap)
            b.add_row_block(("charge_cap", name), LE, 0.0, [(charge + ts, 1.0), (fcol, -1.0)])
            b.add_row_block(("discharge_cap", name), LE, 0.0,
                            [(discharge + ts, 1.0), (fcol, -n.d2c_ratio)])
            b.add_row_block(("stock_hi", name), LE, 0.0, [(inv + ts, 1.0), (scol, -1.0)])
            if n.min_inventory > 0:
                b.add_row_block(("stock_lo", name), GE, 0.0,
                                [(inv + ts, 1.0), (scol, -n.min_inventory)])
            if n.charge_factor is not None:
                f = n.charge_factor
                col = b.add_var_block(name, f"aux_{f.commodity}", T)
                b.add_row_block(("factor", name, f"aux_{f.commodity}"), EQ, 0.0,
                                [(col + ts, 1.0), (charge + ts, -f.coeff)])
        elif isinstance(n, TransportNode):
            cap = b.add_var(VarKey(name, "cap"), obj=years * _annualized_unit_cost(n.economics))
            inp = b.add_var_block(name, "in", T, obj=n.economics.vom)
            out = b.add_var_block(name, "out", T)
            capcol = np.full(T, cap)
            b.add_row_block(("efficiency", name), EQ, 0.0,
                            [(out + ts, 1.0), (inp + ts, -n.efficiency)])
            b.add_row_block(("cap", name), LE, 0.0, [(inp + ts, 1.0), (capcol, -1.0)])
            if n.min_level > 0:
                b.add_row_block(("minlevel", name), GE, 0.0,
                                [(inp + ts, 1.0), (capcol, -n.min_level)])
            if n.ramp < 1.0 and T > 1:
                b.add_row_block(("ramp_up", name), LE, 0.0,
                                [(inp + nxt, 1.0), (inp + ts, -1.0), (capcol, -n.ramp)])
                b.add_row_block(("ramp_dn", name), LE, 0.0,
                                [(inp + ts, 1.0), (inp + nxt, -1.0), (capcol, -n.ramp)])
            for f in n.aux_factors:
                col = b.add_var_block(name, f"aux_{f.commodity}", T)
                b.add_row_block(("factor", name, f"aux_{f.commodity}"), EQ, 0.0,
                                [(col + ts, 1.0), (inp + ts, -f.coeff)])
        elif isinstance(n, DemandNode):
            b.add_var_block(name, "delivered", T, lo=n.quantity, hi=n.quantity)
        else:
            raise CompileError(f"cannot compile node kind {type(n)!r}")

    by_name = {n.name: n for n in model.nodes}
    for e in model.hyperedges:
        terms: list[tuple[np.ndarray, float | np.ndarray]] = []
        for sign, endpoints in ((1.0, e.producers), (-1.0, e.consumers)):
            for ep in endpoints:
                var = port_var(by_name[ep.node], ep.port)
                base = b.varmap.index(VarKey(ep.node, var, 0))
                terms.append((base + ts, sign))
        if terms:
            b.add_row_block(("balance", e.commodity), GE if e.free_disposal else EQ, 0.0, terms)

    return b.build()


def _fmt(x: float) -> str:
    return "%.17g" % x


def _signed(x: float) -> str:
    s = _fmt(abs(x))
    return ("- " if x < 0 else "+ ") + s


def lp_var_name(key: VarKey) -> str:
    if key.t is None:
        return f"n_{key.node}_{key.var}"
    return f"n_{key.node}_{key.var}_{key.t}"


def export_lp(lp: LinearProgram) -> str:
    """Serialize to the CPLEX-style LP text format.

    Sections Minimize / Subject To / Bounds / End, deterministic ordering
    (rows in emission order, columns ascending within each row), 17
    significant digits.  This text is the interoperability surface for
    cross-checking against external solvers.
    """
    names = [lp_var_name(k) for k in lp.varmap.keys]
    if len(set(names)) != len(names):
        seen: set[str] = set()
        for nm in names:
            if nm in seen:
                raise ExportError(f"variable name collision: {nm}")
            seen.add(nm)
    out: list[str] = ["Minimize"]
    terms = [f"{_signed(c)} {names[j]}"
             for j, c in enumerate(lp.obj) if c != 0.0]
    if lp.obj_const:
        terms.append(_signed(lp.obj_const))
    line = " obj:"
    if not terms:
        line += " 0"
    out.append(line)
    for i in range(0, len(terms), 8):
        out.append("     " + " ".join(terms[i:i + 8]))
    out.append("Subject To")
    matrix = lp.matrix
    indptr, indices, data = matrix.indptr, matrix.indices, matrix.data
    sense_str = {LE: "<=", EQ: "=", GE: ">="}
    for i in range(lp.nrows):
        lo_, hi_ = indptr[i], indptr[i + 1]
        cols = indices[lo_:hi_]
        vals = data[lo_:hi_]
        order = np.argsort(cols, kind="stable")
        body = " ".join(
            f"{_signed(vals[k])} {names[cols[k]]}" for k in order if vals[k] != 0.0
        )
        if not body:
            body = "0 " + (names[0] if names else "x")
        out.append(f" c{i}: {body} {sense_str[int(lp.senses[i])]} {_fmt(lp.rhs[i])}")
    out.append("Bounds")
    for j, nm in enumerate(names):
        lo_, hi_ = lp.lo[j], lp.hi[j]
        if lo_ == 0.0 and hi_ == INF:
            continue
        if lo_ == -INF and hi_ == INF:
            out.append(f" {nm} free")
        elif lo_ == hi_:
            out.append(f" {nm} = {_fmt(lo_)}")
        elif lo_ == -INF:
            out.append(f" {nm} <= {_fmt(hi_)}")
        elif hi_ == INF:
            out.append(f" {nm} >= {_fmt(lo_)}")
        else:
            out.append(f" {_fmt(lo_)} <= {nm} <= {_fmt(hi_)}")
    out.append("End")
    return "\n".join(out) + "\n"
