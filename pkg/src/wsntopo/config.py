"""Experiment configuration: one JSON-serializable document drives every run.

Defaults reproduce the standard simulation setup: 1000 nodes on a
1000 x 1000 m region, 100 m transmission range, sink at the (0, 0) corner,
seed topology of 10 nodes and 10 links, degree cap 30, initial energies
uniform on [0.5, 1] J, newcomer link budgets m in {3, 5, 8}, 6-nearest
neighbors, 5% cluster-head probability, and 20 replicates.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from .geometry import DeploymentConfig
from .laee import LaeeParams

__all__ = [
    "DeploymentSettings",
    "EnergySettings",
    "LaeeSettings",
    "BaselineSettings",
    "SweepSettings",
    "ExperimentConfig",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 20120

DEFAULT_FRACTIONS = tuple(round(0.1 * i, 1) for i in range(10))


class DeploymentSettings(BaseModel):
    n: int = 1000
    side: float = 1000.0
    r: float = 100.0
    sink: tuple[float, float] = (0.0, 0.0)


class EnergySettings(BaseModel):
    e_min: float = 0.5
    e_max: float = 1.0


class LaeeSettings(BaseModel):
    m0: int = 10
    e0: int = 10
    m_values: tuple[int, ...] = (3, 5, 8)
    k_max: int = 30
    f_kind: str = "identity"


class BaselineSettings(BaseModel):
    knn_k: int = 6
    leach_p_head: float = 0.05


class SweepSettings(BaseModel):
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    trials: int = 20


class ExperimentConfig(BaseModel):
    """Everything a command needs; flags override file values field-wise."""

    deployment: DeploymentSettings = Field(default_factory=DeploymentSettings)
    energy: EnergySettings = Field(default_factory=EnergySettings)
    laee: LaeeSettings = Field(default_factory=LaeeSettings)
    baselines: BaselineSettings = Field(default_factory=BaselineSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    seed: int = DEFAULT_SEED
    replicates: int = Field(default=20, ge=1)
    out_dir: str = "out"

    def deployment_config(self) -> DeploymentConfig:
        return DeploymentConfig(
            n=self.deployment.n,
            side=self.deployment.side,
            r=self.deployment.r,
            sink_position=tuple(self.deployment.sink),
        )

    def laee_params(self, m: int) -> LaeeParams:
        return LaeeParams(
            m0=self.laee.m0,
            e0=self.laee.e0,
            m=m,
            k_max=self.laee.k_max,
            f_kind=self.laee.f_kind,
        )
