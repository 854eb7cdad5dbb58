"""
Model file schemas - validation of the JSON model documents.
"""
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from bmfl.core.exceptions import ParseException, ValidationException

ComplexPair = Annotated[list[float], Field(min_length=2, max_length=2, description="[re, im]")]
ComplexMatrix = list[list[ComplexPair]]


class DenseTwoBody(BaseModel):
    """Full d^2 x d^2 interaction matrix."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["dense"]
    matrix: ComplexMatrix = Field(..., description="Rows indexed by the pair i * d + j")


class OnsiteTwoBody(BaseModel):
    """On-site contact interaction U on every mode."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["onsite"]
    U: float = Field(..., description="On-site interaction strength")


class PairPotentialTwoBody(BaseModel):
    """Multiplication operator w(x_i - x_j) given by its values by distance."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["pair_potential"]
    geometry: Literal["chain", "ring"] = "chain"
    values: list[float] = Field(..., min_length=1, description="w(0), w(1), ...")


TwoBodySpec = Annotated[
    Union[DenseTwoBody, OnsiteTwoBody, PairPotentialTwoBody],
    Field(discriminator="kind"),
]


class ModelFile(BaseModel):
    """Schema of a model file."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(default="model", min_length=1, max_length=255)
    modes: int = Field(..., ge=1, description="One-particle dimension d")
    geometry: Optional[Literal["chain", "ring"]] = Field(None, description="Lattice geometry")
    one_body: Optional[ComplexMatrix] = Field(None, description="d x d kinetic matrix")
    hopping: Optional[float] = Field(None, description="Nearest-neighbour hopping t")
    external_potential: Optional[list[float]] = Field(None, description="Diagonal potential V")
    two_body: Optional[TwoBodySpec] = None

    @field_validator("one_body", "external_potential")
    @classmethod
    def validate_not_empty(cls, v):
        if v is not None and len(v) == 0:
            raise ValueError("must not be empty")
        return v

    @property
    def effective_geometry(self) -> str:
        if self.geometry is not None:
            return self.geometry
        if isinstance(self.two_body, PairPotentialTwoBody):
            return self.two_body.geometry
        return "chain"


_UNION_TAGS = {"dense", "onsite", "pair_potential"}


def format_location(loc: tuple) -> str:
    """Render a pydantic error location as a JSON path, e.g. two_body.matrix[2][3]."""
    path = ""
    previous = None
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        elif previous == "two_body" and part in _UNION_TAGS:
            pass
        else:
            path += f".{part}" if path else str(part)
        previous = part
    return path


def translate_validation_error(exc: ValidationError) -> ValidationException:
    """First error of a pydantic ValidationError as a ValidationException with its path."""
    error = exc.errors()[0]
    path = format_location(tuple(error.get("loc", ()))) or None
    message = error.get("msg", "invalid value")
    if error.get("type") in ("json_invalid", "model_type"):
        return ParseException(message, path)
    return ValidationException(message, path)
