from pydantic import BaseModel, Field, StrictBool, StrictInt
from typing import List, Dict, Any, Optional


class DatasetFile(BaseModel):
    """On-disk dataset: named vector sets, free-variable values and universe bound."""
    sets: Dict[str, List[List[StrictInt]]] = Field(..., description="Set name to list of integer vectors")
    free: Dict[str, StrictInt] = Field(default_factory=dict, description="Free-variable values")
    universe: Optional[StrictInt] = Field(None, description="Bound U on absolute values", ge=1)


class BoxModel(BaseModel):
    """Axis-aligned box; infinite endpoints are written as null."""
    lo: List[Optional[StrictInt]]
    hi: List[Optional[StrictInt]]
    lo_open: List[StrictBool]
    hi_open: List[StrictBool]


class CubeSetModel(BaseModel):
    """Congruent axis-aligned cubes sharing one side length."""
    side: StrictInt = Field(..., description="Common side length", ge=1)
    corners: List[List[StrictInt]] = Field(..., description="Lower corner of every cube")


class FamilyManifestEntry(BaseModel):
    """One compiled k-SUM instance file."""
    file: str
    sign: int = Field(..., description="Inclusion-exclusion sign", ge=-1, le=1)
    disjuncts: List[int] = Field(..., description="Co-clause indices conjoined in this entry")
    ell: List[int] = Field(default_factory=list, description="Prefix lengths, one per atom")
    carry: List[int] = Field(default_factory=list, description="Carry values W, one per atom")
    deficit: List[int] = Field(default_factory=list, description="Deficits W2, one per atom")


class FamilyManifest(BaseModel):
    """Manifest accompanying an emitted k-SUM family."""
    mode: str = Field(..., description="'decision' or 'counting'")
    k: int = Field(..., ge=1)
    entries: List[FamilyManifestEntry]


class RunManifest(BaseModel):
    """Record of one CLI invocation."""
    command: str
    inputs: List[str] = Field(default_factory=list)
    engine: Optional[str] = None
    seed: Optional[int] = None
    timings: Dict[str, float] = Field(default_factory=dict, description="Wall-clock ms per phase")
    result: Any = None
    notes: List[str] = Field(default_factory=list)


class ParetoInput(BaseModel):
    """Pareto sum problem input; C is omitted for computation."""
    A: List[List[StrictInt]]
    B: List[List[StrictInt]]
    C: Optional[List[List[StrictInt]]] = None


class HausdorffInput(BaseModel):
    """Hausdorff distance under n translations: candidate translations A."""
    A: List[List[StrictInt]]
    B: List[List[StrictInt]]
    C: List[List[StrictInt]]
    gamma: StrictInt = Field(..., ge=0)


class MaxConvInput(BaseModel):
    """(max,+) convolution lower bound input arrays of equal length."""
    A: List[StrictInt]
    B: List[StrictInt]
    C: List[StrictInt]


class SumsetInput(BaseModel):
    """Additive sumset approximation input."""
    A: List[StrictInt]
    B: List[StrictInt]
    C: List[StrictInt]
    t: StrictInt = Field(..., ge=0)
