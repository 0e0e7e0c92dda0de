"""Pydantic request/response models for every service command.

Exact rationals travel as strings like "-1/2"; floating values that must
round-trip losslessly travel as 17-significant-digit decimal strings.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class ClassifyRequest(BaseModel):
    range_min: int = -8
    range_max: int = 4


class ClassifyRow(BaseModel):
    alpha: int
    alpha_bar: str
    integer_dual: bool
    admissible: bool
    reason: str | None = None
    annotation: str | None = None


class ClassifyResponse(BaseModel):
    rows: list[ClassifyRow]
    integer_duals: list[int]
    admissible_duals: list[int]


class SpectrumRequest(BaseModel):
    twice_j: int | None = None
    preset: str | None = None
    coefficients: dict[str, str] | None = None


class OperatorModel(BaseModel):
    twice_j: int
    coefficients: dict[str, str]
    matrix: list[list[str]]
    p4: dict[str, str]
    p3: dict[str, str]
    p2: dict[str, str]


class ComplexNumber(BaseModel):
    re: str
    im: str


class SpectrumResponse(BaseModel):
    twice_j: int
    eigenvalues: list[str | ComplexNumber]
    eigenvectors: list[list[str | ComplexNumber]]
    residual_max: str
    operator: OperatorModel


class DualizeRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    alpha: str
    lam: str | None = Field(default=None, alias="lambda")
    l: str | None = None
    energy: str | None = None
    direction: str = "forward"


class MappedParameters(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: str = Field(alias="lambda")
    l: str
    energy: str


class DualizeResponse(BaseModel):
    alpha: str
    alpha_bar: str
    integer_dual: bool
    admissible: bool
    reason: str | None = None
    annotation: str | None = None
    mapped: MappedParameters | None = None


class SolveRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    alpha: str
    lam: float = Field(alias="lambda")
    l: str = "0"
    r_min: float = 1e-4
    r_max: float | None = None
    points: int = 4000
    levels: int = 3


class LevelModel(BaseModel):
    level: int
    energy: str
    error: str


class SolveResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    alpha: str
    lam: str = Field(alias="lambda")
    l: str
    grid: dict[str, float | int]
    levels: list[LevelModel]


class VerifyRequest(BaseModel):
    coulomb_lambda: float = -1.0
    l: str = "0"
    levels: int = 2
    tolerance: float = 5e-3
    r_min: float = 1e-4
    r_max: float = 60.0
    points: int = 4000


class VerifyLevelModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    level: int
    coulomb_energy: str
    coulomb_error: str
    lambda_bar: str
    l_bar: str
    target: str
    best_match: str
    match_index: int
    residual: str
    within_tolerance: bool


class VerifyResponse(BaseModel):
    tolerance: float
    levels: list[VerifyLevelModel]
    all_within: bool


class ClaimModel(BaseModel):
    claim: str
    printed: str
    computed: str
    agree: bool
    detail: str = ""


class ProportionalityModel(BaseModel):
    alpha: str
    alpha_bar: str
    residual: float
    truncation_estimate: float
    grid: dict[str, float | int]


class CrosscheckRequest(BaseModel):
    which: list[str] | None = None  # default: all
    proportionality: bool = True


class CrosscheckResponse(BaseModel):
    claims: list[ClaimModel]
    any_disagreement: bool
    proportionality: ProportionalityModel | None = None
