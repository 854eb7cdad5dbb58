"""
Measure file schemas.
"""
from pydantic import BaseModel, ConfigDict, Field

from bmfl.schemas.model import ComplexPair


class MeasureAtom(BaseModel):
    """One weighted atom of a de Finetti measure."""

    model_config = ConfigDict(extra="forbid")

    weight: float = Field(..., ge=0.0)
    vector: list[ComplexPair] = Field(..., min_length=1)


class MeasureFile(BaseModel):
    """Schema of a measure file: {"atoms": [{"weight": w, "vector": [[re, im], ...]}]}."""

    model_config = ConfigDict(extra="forbid")

    atoms: list[MeasureAtom] = Field(..., min_length=1)
