"""In-memory graph representation of an energy hub model.

A hub model is a set of commodities, technology nodes and hyperedges.  Each
hyperedge ties every producer and consumer of one commodity into a single
hourly balance.  All values are immutable after construction; validation is
a pure function that reports violations as data rather than raising.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

HOURS_PER_YEAR = 8760

COMMODITY_UNITS = ("GWh", "kt")
PROFILE_KEYS = ("pv", "wind", "flat")
PHASES = ("liquid", "gaseous")


@dataclass(frozen=True)
class Commodity:
    """A commodity exchanged between nodes.

    ``unit`` is GWh for energy flows and kt for mass flows.  ``species``
    collapses location or phase variants of the same substance (e.g. the
    liquefied product at the hub and at the destination) into one label for
    taxonomy and energy accounting; it defaults to the commodity name.
    ``local`` marks a commodity that serves a demand near the hub itself.
    """

    name: str
    unit: str
    species: str = ""
    local: bool = False

    def __post_init__(self) -> None:
        if not self.species:
            object.__setattr__(self, "species", self.name)


@dataclass(frozen=True)
class Horizon:
    """Optimization horizon in hours; ``years`` is the exact fraction T/8760."""

    hours: int

    @property
    def years(self) -> Fraction:
        return Fraction(self.hours, HOURS_PER_YEAR)


@dataclass(frozen=True)
class Economics:
    """Cost parameters of one node, per unit of its sizing variable.

    capex and fom are per capacity unit (M€/GW, M€/(kt/h) or M€/kt for
    storage stock), vom is per flow unit, lifetime in years and wacc a
    dimensionless capital cost rate.
    """

    capex: float = 0.0
    fom: float = 0.0
    vom: float = 0.0
    lifetime: float = 30.0
    wacc: float = 0.07

    @property
    def is_free(self) -> bool:
        return self.capex == 0.0 and self.fom == 0.0 and self.vom == 0.0


@dataclass(frozen=True)
class Factor:
    """A linear coupling coefficient: per unit of reference flow, the node
    consumes (``in``) or emits (``out``) ``coeff`` units of ``commodity``."""

    commodity: str
    coeff: float
    direction: str  # "in" | "out"


@dataclass(frozen=True)
class ConversionNode:
    """Technology converting input commodities to one reference output with
    fixed linear factors, a minimum-level floor and a ramp limit, both as
    fractions of installed capacity."""

    name: str
    output: str
    factors: tuple[Factor, ...] = ()
    min_level: float = 0.0
    ramp: float = 1.0
    economics: Economics = Economics()
    location: str = ""
    cap_scale: float = 1.0
    cap_unit: str = ""

    kind = "conversion"


@dataclass(frozen=True)
class StorageNode:
    """Inventory technology with separately sized flow (charge/discharge
    power) and stock (holding volume) components.

    ``charge_factor`` models auxiliary consumption per unit charged (e.g.
    compression electricity).  ``d2c_ratio`` bounds discharge at that
    multiple of the charging capacity.
    """

    name: str
    commodity: str
    charge_eff: float = 1.0
    discharge_eff: float = 1.0
    self_discharge: float = 0.0
    d2c_ratio: float = 1.0
    min_inventory: float = 0.0
    charge_factor: Optional[Factor] = None
    flow_economics: Economics = Economics()
    stock_economics: Economics = Economics()
    location: str = ""

    kind = "storage"


@dataclass(frozen=True)
class SourceNode:
    """Generation or import of a commodity, limited by a capacity-factor
    profile.  ``flat`` profiles model environment imports (air, sea water)."""

    name: str
    commodity: str
    profile_key: str
    economics: Economics = Economics()
    location: str = ""

    kind = "source"


@dataclass(frozen=True)
class TransportNode:
    """Moves a commodity between buses with efficiency ``efficiency``;
    capacity binds on the input side.  ``aux_factors`` add secondary flows
    per unit throughput (e.g. liquefaction electricity)."""

    name: str
    input: str
    output: str
    efficiency: float = 1.0
    aux_factors: tuple[Factor, ...] = ()
    min_level: float = 0.0
    ramp: float = 1.0
    economics: Economics = Economics()
    location: str = ""

    kind = "transport"


@dataclass(frozen=True)
class DemandNode:
    """Constant hourly offtake of one commodity in its native unit."""

    name: str
    commodity: str
    quantity: float
    phase: str = "gaseous"
    location: str = ""

    kind = "demand"


Node = ConversionNode | StorageNode | SourceNode | TransportNode | DemandNode


@dataclass(frozen=True)
class Endpoint:
    node: str
    port: str


@dataclass(frozen=True)
class Hyperedge:
    """One commodity balance: total production equals total consumption in
    every hour.  With ``free_disposal`` producers may exceed consumers."""

    commodity: str
    producers: tuple[Endpoint, ...]
    consumers: tuple[Endpoint, ...]
    free_disposal: bool = False


@dataclass(frozen=True)
class Port:
    name: str
    commodity: str
    role: str  # "producer" | "consumer"


def node_ports(node: Node) -> tuple[Port, ...]:
    """Enumerate the connection ports a node exposes, in canonical order."""
    if isinstance(node, SourceNode):
        return (Port("out", node.commodity, "producer"),)
    if isinstance(node, DemandNode):
        return (Port("in", node.commodity, "consumer"),)
    if isinstance(node, StorageNode):
        ports = [
            Port("charge", node.commodity, "consumer"),
            Port("discharge", node.commodity, "producer"),
        ]
        if node.charge_factor is not None:
            f = node.charge_factor
            role = "consumer" if f.direction == "in" else "producer"
            ports.append(Port(f"aux_{f.commodity}", f.commodity, role))
        return tuple(ports)
    if isinstance(node, TransportNode):
        ports = [
            Port("in", node.input, "consumer"),
            Port("out", node.output, "producer"),
        ]
        for f in node.aux_factors:
            role = "consumer" if f.direction == "in" else "producer"
            ports.append(Port(f"aux_{f.commodity}", f.commodity, role))
        return tuple(ports)
    if isinstance(node, ConversionNode):
        ports = [Port("out", node.output, "producer")]
        for f in node.factors:
            if f.direction == "in":
                ports.append(Port(f"in_{f.commodity}", f.commodity, "consumer"))
            else:
                ports.append(Port(f"out_{f.commodity}", f.commodity, "producer"))
        return tuple(ports)
    raise TypeError(f"unknown node type: {type(node)!r}")


@dataclass(frozen=True)
class HubModel:
    """The complete hub graph plus horizon, capital cost rate and the
    higher-heating-value table (MWh per tonne, per species) used for energy
    accounting of mass commodities."""

    name: str
    commodities: tuple[Commodity, ...]
    nodes: tuple[Node, ...]
    hyperedges: tuple[Hyperedge, ...]
    horizon: Horizon
    wacc: float = 0.07
    hhv: dict[str, float] = field(default_factory=dict)

    def commodity(self, name: str) -> Commodity:
        for c in self.commodities:
            if c.name == name:
                return c
        raise KeyError(name)

    def node(self, name: str) -> Node:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    def has_commodity(self, name: str) -> bool:
        return any(c.name == name for c in self.commodities)

    def byproduct_commodities(self) -> tuple[str, ...]:
        """Commodities that are produced but attached to no hyperedge and
        consumed nowhere: they drain into an implicit free-disposal sink."""
        on_edges = {e.commodity for e in self.hyperedges}
        produced: set[str] = set()
        consumed: set[str] = set()
        for n in self.nodes:
            for p in node_ports(n):
                (produced if p.role == "producer" else consumed).add(p.commodity)
        return tuple(
            c.name
            for c in self.commodities
            if c.name in produced and c.name not in consumed and c.name not in on_edges
        )


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    subject: str = ""
    severity: str = "error"  # "error" | "warning"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def errors(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.severity == "error")

    @property
    def is_valid(self) -> bool:
        return not self.errors

    @property
    def is_empty(self) -> bool:
        return not self.violations

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)


def _check_economics(econ: Economics, subject: str, out: list[Violation]) -> None:
    if econ.capex < 0 or econ.fom < 0 or econ.vom < 0:
        out.append(Violation("negative-cost", "capex, fom and vom must be >= 0", subject))
    if econ.lifetime <= 0:
        out.append(Violation("bad-lifetime", "lifetime must be > 0", subject))
    if not 0 <= econ.wacc < 1:
        out.append(Violation("bad-wacc", "wacc outside [0, 1)", subject))


def _check_fraction(value: float, lo: float, hi: float, what: str, subject: str,
                    out: list[Violation], lo_open: bool = False, hi_open: bool = False) -> None:
    ok = (value > lo if lo_open else value >= lo) and (value < hi if hi_open else value <= hi)
    if not ok:
        left = "(" if lo_open else "["
        right = ")" if hi_open else "]"
        out.append(Violation(f"bad-{what}", f"{what} outside {left}{lo},{hi}{right}", subject))


def validate_model(model: HubModel) -> ValidationReport:
    """Check every type invariant and the graph wiring of a model.

    Violations are returned as data: ``error`` entries make the model
    unusable for compilation, ``warning`` entries flag structurally legal
    but physically incomplete graphs (e.g. a demanded commodity nobody
    produces, which compiles to an infeasible program).
    """
    out: list[Violation] = []
    names = [c.name for c in model.commodities]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        out.append(Violation("duplicate-commodity", f"duplicate commodity names: {', '.join(dupes)}"))
    for c in model.commodities:
        if c.unit not in COMMODITY_UNITS:
            out.append(Violation("bad-unit", f"unit must be one of {COMMODITY_UNITS}", c.name))

    if model.horizon.hours < 1:
        out.append(Violation("bad-horizon", "horizon must be at least 1 hour"))
    if not 0 <= model.wacc < 1:
        out.append(Violation("bad-wacc", "model wacc outside [0, 1)"))

    node_names = [n.name for n in model.nodes]
    if len(set(node_names)) != len(node_names):
        dupes = sorted({n for n in node_names if node_names.count(n) > 1})
        out.append(Violation("duplicate-node", f"duplicate node names: {', '.join(dupes)}"))

    known = set(names)

    def check_commodity_ref(name: str, subject: str) -> None:
        if name not in known:
            out.append(Violation("unknown-commodity", f"undeclared commodity '{name}'", subject))

    for n in model.nodes:
        if isinstance(n, ConversionNode):
            check_commodity_ref(n.output, n.name)
            seen = {n.output}
            for f in n.factors:
                check_commodity_ref(f.commodity, n.name)
                if f.coeff <= 0:
                    out.append(Violation("bad-factor", f"factor {f.commodity} must have coeff > 0", n.name))
                if f.direction not in ("in", "out"):
                    out.append(Violation("bad-factor", f"factor {f.commodity} direction must be in/out", n.name))
                if f.commodity in seen:
                    out.append(Violation("duplicate-factor", f"commodity {f.commodity} appears twice", n.name))
                seen.add(f.commodity)
            _check_fraction(n.min_level, 0, 1, "min_level", n.name, out)
            _check_fraction(n.ramp, 0, 1, "ramp", n.name, out)
            _check_economics(n.economics, n.name, out)
        elif isinstance(n, StorageNode):
            check_commodity_ref(n.commodity, n.name)
            _check_fraction(n.charge_eff, 0, 1, "charge_eff", n.name, out, lo_open=True)
            _check_fraction(n.discharge_eff, 0, 1, "discharge_eff", n.name, out, lo_open=True)
            _check_fraction(n.self_discharge, 0, 1, "self_discharge", n.name, out, hi_open=True)
            _check_fraction(n.min_inventory, 0, 1, "min_inventory", n.name, out, hi_open=True)
            if n.d2c_ratio <= 0:
                out.append(Violation("bad-d2c_ratio", "d2c_ratio must be > 0", n.name))
            if n.charge_factor is not None:
                check_commodity_ref(n.charge_factor.commodity, n.name)
                if n.charge_factor.coeff <= 0:
                    out.append(Violation("bad-factor", "charge factor coeff must be > 0", n.name))
            _check_economics(n.flow_economics, n.name, out)
            _check_economics(n.stock_economics, n.name, out)
        elif isinstance(n, SourceNode):
            check_commodity_ref(n.commodity, n.name)
            if n.profile_key not in PROFILE_KEYS:
                out.append(Violation("bad-profile", f"profile must be one of {PROFILE_KEYS}", n.name))
            _check_economics(n.economics, n.name, out)
        elif isinstance(n, TransportNode):
            check_commodity_ref(n.input, n.name)
            check_commodity_ref(n.output, n.name)
            if n.input == n.output:
                out.append(Violation("self-transport", "input and output commodity are identical", n.name))
            _check_fraction(n.efficiency, 0, 1, "efficiency", n.name, out, lo_open=True)
            for f in n.aux_factors:
                check_commodity_ref(f.commodity, n.name)
                if f.coeff <= 0:
                    out.append(Violation("bad-factor", f"aux factor {f.commodity} must have coeff > 0", n.name))
            _check_fraction(n.min_level, 0, 1, "min_level", n.name, out)
            _check_fraction(n.ramp, 0, 1, "ramp", n.name, out)
            _check_economics(n.economics, n.name, out)
        elif isinstance(n, DemandNode):
            check_commodity_ref(n.commodity, n.name)
            if n.quantity <= 0:
                out.append(Violation("bad-quantity", "demand quantity must be > 0", n.name))
            if n.phase not in PHASES:
                out.append(Violation("bad-phase", f"phase must be one of {PHASES}", n.name))
            if n.commodity in known:
                unit = model.commodity(n.commodity).unit
                species = model.commodity(n.commodity).species
                if unit == "kt" and species not in model.hhv:
                    out.append(Violation("missing-hhv", f"no hhv entry for species '{species}'", n.name))

    # Graph wiring: every hyperedge endpoint must name a real port of the
    # edge's commodity, and every port must be attached exactly once.
    by_name = {n.name: n for n in model.nodes}
    attached: dict[tuple[str, str], int] = {}
    for i, e in enumerate(model.hyperedges):
        subject = f"hyperedge[{i}]:{e.commodity}"
        check_commodity_ref(e.commodity, subject)
        edge_unit = model.commodity(e.commodity).unit if e.commodity in known else None
        for role, endpoints in (("producer", e.producers), ("consumer", e.consumers)):
            for ep in endpoints:
                node = by_name.get(ep.node)
                if node is None:
                    out.append(Violation("dangling-endpoint", f"unknown node '{ep.node}'", subject))
                    continue
                port = next((p for p in node_ports(node) if p.name == ep.port), None)
                if port is None:
                    out.append(Violation("dangling-endpoint", f"node '{ep.node}' has no port '{ep.port}'", subject))
                    continue
                if port.role != role:
                    out.append(Violation("role-mismatch",
                                         f"port {ep.node}.{ep.port} is a {port.role}, attached as {role}", subject))
                if port.commodity != e.commodity:
                    port_unit = model.commodity(port.commodity).unit if port.commodity in known else None
                    if edge_unit is not None and port_unit is not None and port_unit != edge_unit:
                        out.append(Violation("unit-mismatch",
                                             f"port {ep.node}.{ep.port} carries {port.commodity} [{port_unit}] "
                                             f"on a {e.commodity} [{edge_unit}] hyperedge", subject))
                    else:
                        out.append(Violation("commodity-mismatch",
                                             f"port {ep.node}.{ep.port} carries {port.commodity}, "
                                             f"edge carries {e.commodity}", subject))
                attached[(ep.node, ep.port)] = attached.get((ep.node, ep.port), 0) + 1
        if not e.producers and not e.free_disposal:
            out.append(Violation("no-producer", f"commodity '{e.commodity}' has consumers but no producer",
                                 subject, severity="warning"))
        if e.free_disposal and not e.producers:
            out.append(Violation("bad-free-disposal", "free_disposal edge without producers", subject))

    byproducts = set(model.byproduct_commodities())
    for n in model.nodes:
        for p in node_ports(n):
            count = attached.get((n.name, p.name), 0)
            if count > 1:
                out.append(Violation("multi-attached", f"port {n.name}.{p.name} attached {count} times", n.name))
            elif count == 0:
                if p.role == "producer" and p.commodity in byproducts:
                    continue  # implicit free-disposal sink
                out.append(Violation("port-unattached", f"port unattached: {n.name}.{p.name}", n.name))

    # Supply reachability (warnings): demand must be reachable from sources.
    produced_on_edges: dict[str, bool] = {}
    for e in model.hyperedges:
        produced_on_edges.setdefault(e.commodity, False)
        if e.producers:
            produced_on_edges[e.commodity] = True
    reachable = {e.commodity for e in model.hyperedges
                 if any(isinstance(by_name.get(ep.node), SourceNode) for ep in e.producers)}
    for _ in range(len(model.nodes) + 1):
        grew = False
        for n in model.nodes:
            ports = node_ports(n)
            ins = [p.commodity for p in ports if p.role == "consumer"]
            outs = [p.commodity for p in ports if p.role == "producer"]
            if ins and all(c in reachable for c in ins):
                for c in outs:
                    if c not in reachable:
                        reachable.add(c)
                        grew = True
        if not grew:
            break
    for n in model.nodes:
        if isinstance(n, DemandNode) and n.commodity in known:
            if n.commodity not in reachable:
                out.append(Violation("unreachable-demand",
                                     f"demand '{n.name}' not connected to any source", n.name,
                                     severity="warning"))

    return ValidationReport(tuple(out))


def annuity_factor(wacc: float, lifetime: float) -> float:
    """Factor converting an upfront investment into an equivalent constant
    annual payment over ``lifetime`` years at capital cost rate ``wacc``:
    wacc / (1 - (1+wacc)^-lifetime), with the zero-rate limit 1/lifetime.
    """
    if lifetime <= 0:
        raise ValueError(f"lifetime must be > 0, got {lifetime}")
    if wacc < 0:
        raise ValueError(f"wacc must be >= 0, got {wacc}")
    if wacc == 0.0:
        return 1.0 / lifetime
    return wacc / (1.0 - (1.0 + wacc) ** (-lifetime))


def annualized_fixed_cost(econ: Economics, capacity: float) -> float:
    """Annual fixed cost of ``capacity`` units: annuitized capex plus fom."""
    if capacity < 0:
        raise ValueError(f"capacity must be >= 0, got {capacity}")
    return (annuity_factor(econ.wacc, econ.lifetime) * econ.capex + econ.fom) * capacity
