"""
Validated run configuration and report rows
"""
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from relcoulomb.phasespace import DensityKind


class Command(str, Enum):
    SPECTRUM = "spectrum"
    WAVEFN = "wavefn"
    DENSITY = "density"
    MARGINAL = "marginal"
    EXPECT = "expect"
    VERIFY = "verify"
    SAMPLE = "sample"
    ORBIT = "orbit"
    FIGURE = "figure"


class RunConfig(BaseModel):
    """Everything a command handler needs, after CLI flags are merged over settings"""

    model_config = ConfigDict(frozen=True)

    command: Command
    alpha_z: float = Field(ge=0.0)
    n: int = Field(default=1, ge=1)
    l: Optional[int] = Field(default=None, ge=0)
    n_max: int = Field(default=3, ge=1)
    state: DensityKind = DensityKind.YRAST
    lam: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = 20050101
    samples: int = Field(default=100_000, ge=1)
    workers: int = Field(default=1, ge=1)
    tol: Optional[float] = Field(default=None, gt=0.0)
    abs_tol: float = Field(default=1e-12, gt=0.0)
    rel_tol: float = Field(default=1e-10, gt=0.0)
    max_subdivisions: int = Field(default=200, ge=1)
    grid_min: float = Field(default=0.0, ge=0.0)
    grid_max: float = Field(default=5.0, gt=0.0)
    grid_points: int = Field(default=200, ge=1)
    radius: float = Field(default=1.0, gt=0.0)
    periods: float = Field(default=10.0, gt=0.0)
    resolution: int = Field(default=64, ge=2)
    output: Optional[Path] = None
    output_dir: Path = Path("output")
    format: Literal["csv", "json"] = "csv"
    checks_file: Optional[Path] = None
    quick: bool = False

    @model_validator(mode="after")
    def _check_levels(self) -> "RunConfig":
        level_l = self.level_l
        if level_l > self.n - 1:
            raise ValueError(f"l must satisfy 0 <= l <= n-1, got n={self.n}, l={level_l}")
        if self.grid_max <= self.grid_min:
            raise ValueError(f"grid needs max > min, got [{self.grid_min}, {self.grid_max}]")
        if self.state is not DensityKind.YRAST and self.n != 1 and self.command in (Command.MARGINAL, Command.EXPECT):
            raise ValueError("--n applies to Yrast states only; 2s densities fix n=2")
        return self

    @property
    def level_l(self) -> int:
        """Orbital number, defaulting to the Yrast value n-1"""
        return self.n - 1 if self.l is None else self.l


class CheckDefinition(BaseModel):
    """One entry of the verification suite file"""

    name: str
    anchor: str
    check: str
    tolerance: float = Field(ge=0.0)
    mode: Literal["abs", "rel"] = "abs"
    slow: bool = False
    params: Dict[str, Any] = Field(default_factory=dict)


class VerificationReport(BaseModel):
    """One row of the verification suite: pass iff |computed - reference| <= tol (absolute or relative)"""

    model_config = ConfigDict(populate_by_name=True)

    name: str
    anchor: str
    computed: float
    reference: float
    tol: float
    mode: Literal["abs", "rel"] = "abs"
    passed: bool = Field(alias="pass")

    @classmethod
    def evaluate(
        cls, name: str, anchor: str, computed: float, reference: float, tol: float, mode: str = "abs"
    ) -> "VerificationReport":
        deviation = abs(computed - reference)
        bound = tol * abs(reference) if mode == "rel" else tol
        return cls(
            name=name,
            anchor=anchor,
            computed=computed,
            reference=reference,
            tol=tol,
            mode=mode,
            passed=bool(deviation <= bound),
        )

    def row(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "computed": self.computed,
            "reference": self.reference,
            "tol": self.tol,
            "pass": self.passed,
        }
