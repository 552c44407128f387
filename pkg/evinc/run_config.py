"""
Файл запуска CLI: TOML-секции, проверка pydantic, переопределения --set
evinc/run_config.py
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from evinc.config import build_lambda_schedule, settings
from evinc.exceptions import ConfigError, ContractViolation
from evinc.gallery.coefficients import ThermoplasticCoefficients, ViscoplasticCoefficients
from evinc.gallery.slab import SlabGrid
from evinc.gallery.system import GalleryLoad, GallerySystem, default_rho, gallery_forcing, to_problem
from evinc.gallery.thermoplasticity import assemble_thermoplasticity
from evinc.gallery.viscoplasticity import assemble_viscoplasticity
from evinc.harness.campaign import PropertyCampaign
from evinc.harness.checks import CheckName
from evinc.harness.forcing import random_forcing
from evinc.materials.conditions import ConditionsReport, check_conditions
from evinc.materials.family import MaterialFamily, constant_family, rho_zero, sinusoidal_family
from evinc.relations.catalog import RELATION_REGISTRY, build_relation
from evinc.signals.models import TimeGrid, WeightedSignal
from evinc.signals.weighted_space import read_signal_csv
from evinc.solver.problem import InclusionProblem, SolveMode

logger = logging.getLogger(__name__)

GALLERY_BUILDERS = ("thermoplasticity", "viscoplasticity")
CONDITION_SAMPLES = 200
Matrix = List[List[float]]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridSection(_Section):
    t0: float = 0.0
    dt: float = Field(default=0.01, gt=0)
    n: Optional[int] = Field(default=None, ge=2)
    horizon: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _one_length(self) -> "GridSection":
        if self.n is not None and self.horizon is not None:
            raise ValueError("give either grid.n or grid.horizon, not both")
        return self

    def to_grid(self) -> TimeGrid:
        if self.n is not None:
            return TimeGrid(t0=self.t0, dt=self.dt, n=self.n)
        return TimeGrid.from_horizon(self.t0, self.dt, self.horizon or 1.0)


class MaterialSection(_Section):
    builder: Literal["constant", "sinusoidal", "thermoplasticity", "viscoplasticity"] = "constant"
    m0: Optional[Matrix] = None
    m1: Optional[Matrix] = None
    amplitude: float = 0.5
    frequency: float = 1.0
    c0: Optional[float] = None
    c1: Optional[float] = None
    lip_m0: Optional[float] = None
    sup_m1: Optional[float] = None

    @model_validator(mode="after")
    def _matrix_given(self) -> "MaterialSection":
        if self.builder not in GALLERY_BUILDERS and self.m0 is None:
            raise ValueError(f"material.m0 is required for builder {self.builder!r}")
        return self

    @model_validator(mode="after")
    def _square_matrices(self) -> "MaterialSection":
        if self.m0 is None:
            return self
        size = len(self.m0)
        for key, matrix in (("m0", self.m0), ("m1", self.m1)):
            if matrix is None:
                continue
            if len(matrix) != size or any(len(row) != size for row in matrix):
                raise ValueError(f"material.{key} must be a square {size}x{size} matrix")
        if size == 0:
            raise ValueError("material.m0 must not be empty")
        return self


class RelationSection(_Section):
    relation: str = "zero"
    weight: Optional[float] = None
    norm: Optional[Literal["l1", "l2"]] = None
    radius: Optional[float] = None
    scale: Optional[float] = None
    matrix: Optional[Matrix] = None

    @model_validator(mode="after")
    def _known(self) -> "RelationSection":
        if self.relation not in RELATION_REGISTRY:
            raise ValueError(f"unknown relation {self.relation!r}; known: {', '.join(sorted(RELATION_REGISTRY))}")
        return self

    def params(self) -> Dict[str, Any]:
        params = self.model_dump(exclude={"relation"}, exclude_none=True)
        if "matrix" in params:
            params["matrix"] = np.asarray(params["matrix"], dtype=float)
        return params


class ForcingSection(_Section):
    """kind не задан: нагрузка галереи для моделей галереи, иначе нуль"""

    kind: Optional[Literal["constant", "indicator", "pulse", "zero", "random", "csv"]] = None
    amplitude: Union[float, List[float]] = 1.0
    start: float = 0.0
    stop: float = 1.0
    path: Optional[str] = None
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _path_for_csv(self) -> "ForcingSection":
        if self.kind == "csv" and not self.path:
            raise ValueError("forcing.path is required for kind 'csv'")
        return self


class SolverSection(_Section):
    rho: Optional[float] = Field(default=None, gt=0)
    c_tilde: Optional[float] = Field(default=None, gt=0)
    mode: Literal["direct", "yosida"] = "direct"
    fp_tol: float = Field(default_factory=lambda: settings.FP_TOL, gt=0)
    fp_max_iter: int = Field(default_factory=lambda: settings.FP_MAX_ITER, ge=1)
    lambda_start: float = Field(default_factory=lambda: settings.LAMBDA_START, gt=0)
    lambda_stop: float = Field(default_factory=lambda: settings.LAMBDA_STOP, gt=0)
    lambda_factor: float = Field(default_factory=lambda: settings.LAMBDA_FACTOR, gt=0, lt=1)

    @property
    def solve_mode(self) -> SolveMode:
        return SolveMode.DIRECT if self.mode == "direct" else SolveMode.YOSIDA_PATH


class CampaignSection(_Section):
    trials: int = Field(default=10, ge=0)
    checks: List[CheckName] = list(CheckName)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0)
    workers: int = Field(default_factory=lambda: settings.CAMPAIGN_WORKERS, ge=1)
    tolerances: Dict[CheckName, float] = {}


class _GallerySection(_Section):
    m: int = Field(default=8, ge=2)
    dx: float = Field(default=0.25, gt=0)
    body_force: float = 1.0
    heat_source: float = 0.0
    load_start: float = 0.0
    load_stop: float = 0.5

    def slab(self) -> SlabGrid:
        return SlabGrid(m=self.m, dx=self.dx)

    def load(self) -> GalleryLoad:
        return GalleryLoad(
            body_force=self.body_force, heat_source=self.heat_source, start=self.load_start, stop=self.load_stop
        )


class ThermoplasticitySection(_GallerySection, ThermoplasticCoefficients):
    def coefficients(self) -> ThermoplasticCoefficients:
        return ThermoplasticCoefficients(**self.model_dump(include=set(ThermoplasticCoefficients.model_fields)))


class ViscoplasticitySection(_GallerySection, ViscoplasticCoefficients):
    def coefficients(self) -> ViscoplasticCoefficients:
        return ViscoplasticCoefficients(**self.model_dump(include=set(ViscoplasticCoefficients.model_fields)))


class RunConfig(_Section):
    grid: GridSection = GridSection()
    material: MaterialSection = MaterialSection(m0=[[1.0]])
    relation: RelationSection = RelationSection()
    forcing: ForcingSection = ForcingSection()
    solver: SolverSection = Field(default_factory=SolverSection)
    campaign: CampaignSection = Field(default_factory=CampaignSection)
    thermoplasticity: ThermoplasticitySection = ThermoplasticitySection()
    viscoplasticity: ViscoplasticitySection = ViscoplasticitySection()

    @property
    def is_gallery(self) -> bool:
        return self.material.builder in GALLERY_BUILDERS


def recognized_keys() -> Dict[str, List[str]]:
    """Секция -> допустимые ключи, для --help"""
    return {
        section: sorted(field.annotation.model_fields)
        for section, field in RunConfig.model_fields.items()
    }


def _parse_scalar(text: str) -> Any:
    try:
        return tomllib.loads(f"value = {text}")["value"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """`section.key=value`; value разбирается как TOML-значение, иначе строка"""
    for item in overrides:
        key, sep, text = item.partition("=")
        path = key.strip().split(".")
        if not sep or len(path) < 2 or not all(path):
            raise ConfigError(f"override {item!r} must look like section.key=value")
        target = data
        for part in path[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError(f"override {item!r}: {part!r} is not a section")
        target[path[-1]] = _parse_scalar(text.strip())
    return data


def load_run_config(path: Optional[Union[str, Path]] = None, overrides: Sequence[str] = ()) -> RunConfig:
    """
    Raises:
        ConfigError: файл не найден, не TOML или не проходит проверку
    """
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: invalid TOML: {e}") from e
    data = apply_overrides(data, overrides)
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{path or '<defaults>'}: {e}") from e
    logger.debug(f"🔧 Run config loaded from {path or '<defaults>'}")
    return config


def build_family(config: RunConfig) -> MaterialFamily:
    material = config.material
    claims = {
        "c0": material.c0,
        "c1": material.c1,
        "lip_m0": material.lip_m0,
        "sup_m1": material.sup_m1,
    }
    if material.builder == "constant":
        claims["lip_m0"] = claims["lip_m0"] or 0.0
        return constant_family(material.m0, material.m1, **claims)
    if material.builder == "sinusoidal":
        return sinusoidal_family(
            material.m0, material.m1, amplitude=material.amplitude, frequency=material.frequency, **claims
        )
    return build_gallery(config).family


def build_gallery(config: RunConfig) -> GallerySystem:
    grid = config.grid.to_grid()
    horizon = (grid.t0, grid.t_end)
    if config.material.builder == "thermoplasticity":
        section = config.thermoplasticity
        return assemble_thermoplasticity(section.slab(), section.coefficients(), horizon)
    if config.material.builder == "viscoplasticity":
        section = config.viscoplasticity
        return assemble_viscoplasticity(section.slab(), section.coefficients(), horizon)
    raise ConfigError(f"material.builder {config.material.builder!r} is not a gallery model")


def sample_conditions(family: MaterialFamily, grid: TimeGrid) -> ConditionsReport:
    samples = grid.times if grid.n <= CONDITION_SAMPLES else np.linspace(grid.t0, grid.t_end, CONDITION_SAMPLES)
    return check_conditions(family, samples)


def build_forcing(section: ForcingSection, grid: TimeGrid, dim: int, rho: float) -> WeightedSignal:
    amplitude = np.broadcast_to(np.asarray(section.amplitude, dtype=float), (dim,))
    times = grid.times
    if section.kind in (None, "zero"):
        return WeightedSignal.zeros(grid, dim, rho)
    if section.kind == "constant":
        return WeightedSignal(grid=grid, values=np.tile(amplitude, (grid.n, 1)), rho=rho)
    if section.kind == "indicator":
        active = ((times >= section.start) & (times <= section.stop)).astype(float)
        return WeightedSignal(grid=grid, values=np.outer(active, amplitude), rho=rho)
    if section.kind == "pulse":
        width = section.stop - section.start
        if not width > 0:
            raise ConfigError("forcing.stop must exceed forcing.start for a pulse")
        phase = np.clip((times - section.start) / width, 0.0, 1.0)
        return WeightedSignal(grid=grid, values=np.outer(np.sin(np.pi * phase), amplitude), rho=rho)
    if section.kind == "random":
        seed = settings.DEFAULT_SEED if section.seed is None else section.seed
        return random_forcing(grid, dim, rho, np.random.default_rng(seed))
    try:
        signal = read_signal_csv(section.path, rho)
    except OSError as e:
        raise ConfigError(f"forcing.path: cannot read {section.path}: {e}") from e
    except ContractViolation as e:
        raise ConfigError(f"forcing.path: {e}") from e
    if signal.grid != grid or signal.dim != dim:
        raise ConfigError(
            f"{section.path}: signal grid/dim {signal.grid}/{signal.dim} does not match {grid}/{dim}"
        )
    return signal


def _lambda_schedule(section: SolverSection) -> Tuple[float, ...]:
    try:
        return tuple(build_lambda_schedule(section.lambda_start, section.lambda_stop, section.lambda_factor))
    except ValueError as e:
        raise ConfigError(str(e)) from e


def build_problem(config: RunConfig) -> InclusionProblem:
    """
    Задача по конфигу; для матричных семейств условия проверяются и прикладываются к задаче.

    Raises:
        ConfigError, ContractViolation: ошибки конфигурации
        ConditionViolation: модель галереи не прошла условия
    """
    grid = config.grid.to_grid()
    solver = config.solver
    options = {
        "mode": solver.solve_mode,
        "fp_tol": solver.fp_tol,
        "fp_max_iter": solver.fp_max_iter,
        "lambda_schedule": _lambda_schedule(solver),
    }
    if config.is_gallery:
        system = build_gallery(config)
        rho = solver.rho or default_rho(system, solver.c_tilde)
        section = getattr(config, config.material.builder)
        if config.forcing.kind is None:
            heat_scale = section.coupling / section.tau0 if config.material.builder == "thermoplasticity" else 1.0
            forcing = gallery_forcing(system, grid, rho, section.load(), heat_scale=heat_scale)
        else:
            forcing = build_forcing(config.forcing, grid, system.dim, rho)
        return to_problem(system, forcing, c_tilde=solver.c_tilde, **options)

    family = build_family(config)
    conditions = sample_conditions(family, grid)
    relation = build_relation(config.relation.relation, family.dim, config.relation.params())
    c_tilde = solver.c_tilde if solver.c_tilde is not None else 0.5 * min(1.0, family.c1)
    rho = solver.rho if solver.rho is not None else max(1.0, rho_zero(family, c_tilde))
    return InclusionProblem(
        family=family,
        relation=relation,
        forcing=build_forcing(config.forcing, grid, family.dim, rho),
        rho=rho,
        c_tilde=c_tilde,
        name=config.material.builder,
        conditions=conditions,
        **options,
    )


def build_campaign(config: RunConfig, problem: InclusionProblem) -> PropertyCampaign:
    section = config.campaign
    return PropertyCampaign(
        problem=lambda: problem,
        trials=section.trials,
        seed=section.seed,
        checks=tuple(section.checks),
        tolerances=section.tolerances,
        workers=section.workers,
        name=problem.name,
    )
