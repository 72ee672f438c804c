"""Scenario catalog: the four e-fuel hub models with embedded parameters.

Each scenario chains desert renewables (PV, wind, battery) through an HVDC
link to a coastal synthesis plant and ships the product to a remote load
center.  Carriers: methane (DAC + methanation + LNG chain), ammonia (ASU +
Haber-Bosch), hydrogen (direct liquefaction) and methanol (DAC + synthesis,
liquid at ambient conditions, no liquefaction or regasification).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .model import (
    Commodity,
    ConversionNode,
    DemandNode,
    Economics,
    Endpoint,
    Factor,
    Horizon,
    HubModel,
    Hyperedge,
    Node,
    SourceNode,
    StorageNode,
    TransportNode,
    node_ports,
)

CARRIERS = ("methane", "ammonia", "hydrogen", "methanol")

#: Higher heating values in MWh per tonne, shared by all scenarios.
HHV_TABLE = {"h2": 39.4, "ch4": 15.4, "nh3": 6.25, "ch3oh": 6.3}

#: Energy intensity of the electrolyzers (GWh of electricity per kt of H2);
#: also converts their per-GW cost quotes to the kt/h sizing basis.
ELECTROLYSIS_GWH_PER_KT = 50.6

SCENARIO_DIR_ENV = "HUBFORGE_SCENARIO_DIR"


class ScenarioError(ValueError):
    """Raised for invalid scenario identifiers or options."""


@dataclass(frozen=True)
class ScenarioId:
    carrier: str
    phase: str = "gaseous"

    def __post_init__(self) -> None:
        if self.carrier not in CARRIERS:
            raise ScenarioError(f"unknown carrier '{self.carrier}', expected one of {CARRIERS}")
        if self.phase not in ("liquid", "gaseous"):
            raise ScenarioError(f"unknown phase '{self.phase}'")
        if self.carrier == "methanol" and self.phase == "gaseous":
            raise ScenarioError("methanol is delivered liquid only; no gaseous phase exists")


@dataclass(frozen=True)
class ScenarioOptions:
    """Knobs shared by every scenario build.

    The horizon must span at least one week for the storage dynamics to
    mean anything.  Demand is annual fuel energy at the load center in TWh
    (higher heating value); the profile fields are carried for runner
    plumbing and do not affect the graph.
    """

    horizon_hours: int = 1344
    annual_demand_twh: float = 10.0
    wacc: float = 0.07
    profile_path: Optional[str] = None
    synth_seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.horizon_hours < 168:
            raise ScenarioError("horizon must be at least 168 hours (one week)")
        if self.annual_demand_twh <= 0:
            raise ScenarioError("annual demand must be positive")
        if not 0 <= self.wacc < 1:
            raise ScenarioError("wacc outside [0, 1)")


def all_scenario_ids() -> tuple[ScenarioId, ...]:
    """Every (carrier, phase) combination that exists, in catalog order."""
    ids = []
    for carrier in CARRIERS:
        ids.append(ScenarioId(carrier, "liquid"))
        if carrier != "methanol":
            ids.append(ScenarioId(carrier, "gaseous"))
    return tuple(ids)


def scenario_dir() -> Path:
    """Directory holding the bundled ``.hub`` scenario files; the
    HUBFORGE_SCENARIO_DIR environment variable overrides it."""
    override = os.environ.get(SCENARIO_DIR_ENV)
    if override:
        return Path(override)
    return Path(__file__).parent / "scenarios"


def scenario_path(carrier: str) -> Path:
    return scenario_dir() / f"{carrier}.hub"


def hourly_demand_kt(annual_twh: float, species: str) -> float:
    """Constant hourly offtake in kt/h equivalent to ``annual_twh`` per year."""
    return annual_twh * 1e6 / 8760.0 / HHV_TABLE[species] / 1000.0


def _econ(capex: float, fom: float, vom: float, lifetime: float, wacc: float) -> Economics:
    return Economics(capex=capex, fom=fom, vom=vom, lifetime=lifetime, wacc=wacc)


def _common_commodities() -> list[Commodity]:
    return [
        Commodity("elec_hub", "GWh", species="electricity"),
        Commodity("elec", "GWh", species="electricity"),
        Commodity("seawater", "kt"),
        Commodity("h2o", "kt"),
        Commodity("h2", "kt"),
        Commodity("o2", "kt"),
        Commodity("heat", "GWh"),
    ]


def _common_nodes(w: float) -> list[Node]:
    """Desert generation, transmission and the water/hydrogen head of every
    chain.  ``w`` is the capital cost rate applied to all nodes."""
    elz = ELECTROLYSIS_GWH_PER_KT
    return [
        SourceNode("pv", "elec_hub", "pv", _econ(380.0, 7.25, 0.0, 25.0, w), "desert"),
        SourceNode("wind", "elec_hub", "wind", _econ(1040.0, 12.6, 0.00135, 30.0, w), "desert"),
        StorageNode(
            "battery", "elec_hub",
            charge_eff=0.959, discharge_eff=0.959, self_discharge=0.00004,
            flow_economics=_econ(160.0, 0.5, 0.0, 10.0, w),
            stock_economics=_econ(142.0, 0.0, 0.0018, 10.0, w),
            location="desert",
        ),
        TransportNode("hvdc", "elec_hub", "elec", efficiency=0.9499,
                      economics=_econ(480.0, 7.1, 0.0, 40.0, w), location="desert"),
        SourceNode("seawater_supply", "seawater", "flat", Economics(wacc=w), "coast"),
        ConversionNode(
            "desalination", "h2o",
            factors=(Factor("elec", 0.004, "in"), Factor("seawater", 2.2, "in")),
            min_level=1.0, ramp=0.0,
            economics=_econ(28.08, 0.0, 0.000315, 20.0, w), location="coast",
        ),
        StorageNode(
            "water_storage", "h2o",
            charge_factor=Factor("elec", 0.00036, "in"),
            flow_economics=_econ(1.55923, 0.0312, 0.0, 30.0, w),
            stock_economics=_econ(0.065, 0.0013, 0.0, 30.0, w),
            location="coast",
        ),
        ConversionNode(
            "electrolysis", "h2",
            factors=(
                Factor("elec", elz, "in"),
                Factor("h2o", 9.0, "in"),
                Factor("o2", 8.0, "out"),
                Factor("heat", 8.0, "out"),
            ),
            min_level=0.05, ramp=1.0,
            economics=_econ(600.0 * elz, 30.0 * elz, 0.0, 15.0, w),
            location="coast", cap_scale=elz, cap_unit="GW",
        ),
        StorageNode(
            "h2_storage", "h2",
            min_inventory=0.05,
            charge_factor=Factor("elec", 1.3, "in"),
            stock_economics=_econ(45.0, 2.25, 0.0, 30.0, w),
            location="coast",
        ),
    ]


def _dac_chain(w: float) -> list[Node]:
    return [
        SourceNode("air_supply", "air", "flat", Economics(wacc=w), "coast"),
        ConversionNode(
            "dac", "co2",
            factors=(
                Factor("elec", 0.1091, "in"),
                Factor("h2", 0.0438, "in"),
                Factor("h2o", 5.0, "in"),
                Factor("air", 2270.0, "in"),
            ),
            min_level=1.0, ramp=0.0,
            economics=_econ(4801.4, 0.0, 0.0207, 30.0, w), location="coast",
        ),
        StorageNode(
            "co2_storage", "co2",
            charge_factor=Factor("elec", 0.105, "in"),
            flow_economics=_econ(48.6, 2.43, 0.0, 30.0, w),
            stock_economics=_econ(1.35, 0.0675, 0.0, 30.0, w),
            location="coast",
        ),
    ]


def _carrier_nodes(sid: ScenarioId, opts: ScenarioOptions) -> tuple[list[Commodity], list[Node]]:
    w = opts.wacc
    gaseous = sid.phase == "gaseous"

    if sid.carrier == "methane":
        commodities = [
            Commodity("air", "kt"),
            Commodity("co2", "kt"),
            Commodity("ch4", "kt"),
            Commodity("lch4", "kt", species="ch4"),
            Commodity("lch4_dest", "kt", species="ch4"),
        ]
        nodes = _dac_chain(w) + [
            ConversionNode(
                "methanation", "ch4",
                factors=(
                    Factor("h2", 0.5, "in"),
                    Factor("co2", 2.75, "in"),
                    Factor("h2o", 2.25, "out"),
                    Factor("heat", 2.87, "out"),
                ),
                min_level=0.4, ramp=1.0,
                economics=_econ(735.0 * 15.4, 29.4 * 15.4, 0.0, 20.0, w),
                location="coast", cap_scale=15.4, cap_unit="GW",
            ),
            TransportNode(
                "ch4_liquefaction", "ch4", "lch4", efficiency=1.0,
                aux_factors=(Factor("elec", 0.616, "in"),),
                min_level=1.0, ramp=0.0,
                economics=_econ(5913.0, 147.825, 0.0, 30.0, w), location="coast",
            ),
            StorageNode(
                "lch4_storage", "lch4",
                stock_economics=_econ(2.641, 0.05282, 0.0, 30.0, w), location="coast",
            ),
            TransportNode("lch4_carrier", "lch4", "lch4_dest", efficiency=0.994,
                          economics=_econ(2.537, 0.12685, 0.0, 30.0, w), location="coast"),
        ]
        if gaseous:
            commodities.append(Commodity("ch4_dest", "kt", species="ch4"))
            nodes.append(TransportNode("regasification", "lch4_dest", "ch4_dest", efficiency=0.98,
                                       economics=_econ(1248.3, 29.97, 0.0, 30.0, w),
                                       location="load_center"))
        delivered = "ch4_dest" if gaseous else "lch4_dest"

    elif sid.carrier == "ammonia":
        commodities = [
            Commodity("air", "kt"),
            Commodity("n2", "kt"),
            Commodity("ar", "kt"),
            Commodity("lnh3", "kt", species="nh3"),
            Commodity("lnh3_dest", "kt", species="nh3"),
        ]
        nodes = [
            SourceNode("air_supply", "air", "flat", Economics(wacc=w), "coast"),
            ConversionNode(
                "asu", "n2",
                factors=(
                    Factor("elec", 0.1081, "in"),
                    Factor("air", 1.3242, "in"),
                    Factor("o2", 0.3069, "out"),
                    Factor("ar", 0.0173, "out"),
                ),
                min_level=1.0, ramp=0.0,
                economics=_econ(850.0, 50.0, 0.0, 30.0, w), location="coast",
            ),
            StorageNode(
                "n2_storage", "n2",
                charge_factor=Factor("elec", 0.1081, "in"),
                stock_economics=_econ(45.0, 2.25, 0.0, 30.0, w), location="coast",
            ),
            ConversionNode(
                "haber_bosch", "lnh3",
                factors=(
                    Factor("elec", 0.32, "in"),
                    Factor("h2", 0.18, "in"),
                    Factor("n2", 0.84, "in"),
                    Factor("heat", 0.75, "out"),
                ),
                min_level=0.2, ramp=1.0,
                economics=_econ(6825.0, 204.75, 0.000105, 30.0, w), location="coast",
            ),
            StorageNode(
                "lnh3_storage", "lnh3",
                self_discharge=0.00003,
                flow_economics=_econ(0.10, 0.001, 0.0, 30.0, w),
                stock_economics=_econ(0.867, 0.01735, 0.0, 30.0, w), location="coast",
            ),
            TransportNode("lnh3_carrier", "lnh3", "lnh3_dest", efficiency=0.994,
                          economics=_econ(1.75, 0.09, 0.0, 30.0, w), location="coast"),
        ]
        if gaseous:
            commodities.append(Commodity("nh3_dest", "kt", species="nh3"))
            nodes.append(TransportNode("nh3_regasification", "lnh3_dest", "nh3_dest", efficiency=0.98,
                                       economics=_econ(1248.3, 29.97, 0.0, 30.0, w),
                                       location="load_center"))
        delivered = "nh3_dest" if gaseous else "lnh3_dest"

    elif sid.carrier == "hydrogen":
        commodities = [
            Commodity("lh2", "kt", species="h2"),
            Commodity("lh2_dest", "kt", species="h2"),
        ]
        nodes = [
            TransportNode(
                "h2_liquefaction", "h2", "lh2", efficiency=1.0,
                aux_factors=(Factor("elec", 12.0, "in"),),
                min_level=1.0, ramp=0.0,
                economics=_econ(45000.0, 1125.825, 0.0, 40.0, w), location="coast",
            ),
            StorageNode(
                "lh2_storage", "lh2",
                self_discharge=0.00008,
                stock_economics=_econ(25.0, 0.5, 0.0, 30.0, w), location="coast",
            ),
            TransportNode("lh2_carrier", "lh2", "lh2_dest", efficiency=0.945,
                          economics=_econ(14.0, 0.07, 0.0, 30.0, w), location="coast"),
        ]
        if gaseous:
            commodities.append(Commodity("h2_dest", "kt", species="h2"))
            nodes.append(TransportNode("lh2_regasification", "lh2_dest", "h2_dest", efficiency=1.0,
                                       economics=_econ(9100.0, 27.8, 0.0, 30.0, w),
                                       location="load_center"))
        delivered = "h2_dest" if gaseous else "lh2_dest"

    else:  # methanol, liquid only
        commodities = [
            Commodity("air", "kt"),
            Commodity("co2", "kt"),
            Commodity("ch3oh", "kt"),
            Commodity("ch3oh_dest", "kt", species="ch3oh"),
        ]
        nodes = _dac_chain(w) + [
            ConversionNode(
                "meoh_synthesis", "ch3oh",
                factors=(
                    Factor("elec", 0.1, "in"),
                    Factor("h2", 0.209, "in"),
                    Factor("co2", 1.37, "in"),
                    Factor("h2o", 0.93, "in"),
                    Factor("heat", 0.43, "out"),
                ),
                min_level=0.1, ramp=1.0,
                # quoted per kt/h of hydrogen feed; rebased to the methanol
                # output via the 0.209 kt H2 per kt CH3OH feed ratio
                economics=_econ(57252.80 * 0.209, 158.31, 0.0, 30.0, w),
                location="coast",
            ),
            StorageNode(
                "ch3oh_storage", "ch3oh",
                flow_economics=_econ(0.0625, 0.0, 0.0, 30.0, w),
                stock_economics=_econ(2.778, 0.0, 0.0, 30.0, w), location="coast",
            ),
            TransportNode("ch3oh_carrier", "ch3oh", "ch3oh_dest", efficiency=0.993,
                          economics=_econ(0.69, 0.04, 0.0, 30.0, w), location="coast"),
        ]
        delivered = "ch3oh_dest"

    species = {"methane": "ch4", "ammonia": "nh3", "hydrogen": "h2", "methanol": "ch3oh"}[sid.carrier]
    nodes.append(DemandNode("demand", delivered,
                            quantity=hourly_demand_kt(opts.annual_demand_twh, species),
                            phase=sid.phase, location="load_center"))
    return commodities, nodes


def wire_hyperedges(commodities: list[Commodity], nodes: list[Node]) -> tuple[Hyperedge, ...]:
    """Build one hyperedge per commodity from the declared node ports.

    Commodities with producers but no consumers are byproducts and get no
    edge (they drain into the implicit free-disposal sink).
    """
    producers: dict[str, list[Endpoint]] = {c.name: [] for c in commodities}
    consumers: dict[str, list[Endpoint]] = {c.name: [] for c in commodities}
    for n in nodes:
        for p in node_ports(n):
            target = producers if p.role == "producer" else consumers
            target[p.commodity].append(Endpoint(n.name, p.name))
    edges = []
    for c in commodities:
        prod, cons = producers[c.name], consumers[c.name]
        if not cons and prod:
            continue  # byproduct: implicit disposal
        if not cons and not prod:
            continue  # declared but unused
        edges.append(Hyperedge(c.name, tuple(prod), tuple(cons)))
    return tuple(edges)


def build_scenario(sid: ScenarioId, opts: ScenarioOptions = ScenarioOptions()) -> HubModel:
    """Assemble the full hub graph for one carrier and delivery phase."""
    commodities = _common_commodities()
    extra_commodities, nodes = _carrier_nodes(sid, opts)
    commodities += extra_commodities
    all_nodes = _common_nodes(opts.wacc) + nodes
    edges = wire_hyperedges(commodities, all_nodes)
    return HubModel(
        name=f"{sid.carrier}_{sid.phase}",
        commodities=tuple(commodities),
        nodes=tuple(all_nodes),
        hyperedges=edges,
        horizon=Horizon(opts.horizon_hours),
        wacc=opts.wacc,
        hhv=dict(HHV_TABLE),
    )
