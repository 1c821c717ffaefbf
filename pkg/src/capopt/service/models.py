"""Pydantic request models for the HTTP service.

These mirror the JSON schemas in capopt.schemas; the service validates shape
here and delegates value-level checks to the core parsers so error messages
name the offending field consistently across CLI and HTTP.
"""

from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class MaskPointModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    freq_Hz: float
    target_ohm: float
    series_ohm: float = 0.0
    load_ohm: float = 0.0


class FilterModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    max_height_mm: Optional[float] = None
    min_voltage_rating_V: Optional[float] = None
    allowed_dielectrics: Optional[list[str]] = None
    allowed_manufacturers: Optional[list[str]] = None


class SpecModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    ceff_uF: float = 0.0
    bias_V: float = 0.0
    K_mm2_per_cent: float = 1.0
    mask: list[MaskPointModel] = Field(default_factory=list)
    filter: Optional[FilterModel] = None

    def to_dict(self) -> dict:
        return self.model_dump(exclude_none=True)


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    spec: SpecModel
    k_min: float
    k_max: float
    steps: int
    spacing: str = "log"


class LocationModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    label: str
    K_j: float = 1.0
    mask: list[MaskPointModel] = Field(default_factory=list)
    ceff_uF: float = 0.0


class CouplingEdgeModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    a: str
    b: str
    freq_Hz: Optional[float] = None
    Y_S: float


class PdnRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    bias_V: float = 0.0
    locations: list[LocationModel]
    coupling: list[CouplingEdgeModel] = Field(default_factory=list)
    # Inline part objects override the service's loaded library.
    parts: Optional[list[dict]] = None
    count_cap: Optional[int] = None


class SupplyTierModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    min_quantity: int
    unit_price_cents: Union[float, str]


class SupplyModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    tiers: list[SupplyTierModel]


class DemandRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    applications: list[SpecModel]
    part_id: str
    price_grid: list[Union[float, str]]
    supply: Optional[SupplyModel] = None
