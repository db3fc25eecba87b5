from __future__ import annotations

import os
from enum import StrEnum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

ENV_FILE_NAME: str = os.environ.get("ENV_FILE", ".env")
ENV_FILE_PATH: Path = Path(ENV_FILE_NAME).resolve()


class Settings(BaseSettings):
    """Runtime knobs of the simulator process (not of the simulated system)."""

    model_config = SettingsConfigDict(
        env_file=ENV_FILE_NAME,
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = "INFO"
    log_file: str = "logs/sim.log"

    # Diagnostics
    error_log_file: str = "logs/errors.log"
    runs_log_file: str = "logs/runs.log"
    diagnostics_max_size_mb: int = 5

    # Experiments
    output_dir: str = "results"
    concurrent_runs: int = 1  # worker processes for independent runs; 1 = sequential

    # Debug mode: per-step engine events at DEBUG level
    debug_mode: bool = False


settings = Settings()


class PolicyName(StrEnum):
    CACTIS = "cactis"
    ORION = "orion"
    CK = "ck"


class SplitPolicy(StrEnum):
    NO_SPLIT = "no_split"
    PAGE_SPLIT = "page_split"


class OrionReclusterMode(StrEnum):
    REPACK = "repack"
    MESSAGES_ONLY = "messages_only"


_PROBABILITY = {"ge": 0.0, "le": 1.0}


class CkConfig(BaseModel):
    """Cost constants and relationship access frequencies of the CK policy."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lookup_cost: float = Field(1.0, ge=0.0)
    storage_cost: float | None = Field(None, ge=0.0)  # per byte; None = 1/PGSIZE
    prob_version: float = Field(0.4, gt=0.0, le=1.0)
    prob_configuration: float = Field(0.4, gt=0.0, le=1.0)
    prob_equivalence: float = Field(0.2, gt=0.0, le=1.0)
    cluster_policy: SplitPolicy = SplitPolicy.PAGE_SPLIT


class OrionConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    cluster_messages: list[list[int]] = Field(default_factory=list)
    recluster_mode: OrionReclusterMode = OrionReclusterMode.REPACK

    @field_validator("cluster_messages")
    @classmethod
    def _disjoint_messages(cls, messages: list[list[int]]) -> list[list[int]]:
        grouped: set[int] = set()
        for message in messages:
            if any(class_id < 1 for class_id in message):
                raise ValueError(f"class ids start at 1, got {message}")
            members = set(message)
            if len(members) < 2:
                continue
            shared = members & grouped
            if shared:
                raise ValueError(f"classes {sorted(shared)} appear in two cluster messages")
            grouped |= members
        return messages


class SimConfig(BaseModel):
    """Every static and dynamic parameter of one simulation run.

    Field names follow the parameter names of the simulation model
    (``PGSIZE``, ``BUFSIZE``, ...). Times are in milliseconds except
    ``MINTER`` which is in seconds.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    # Static parameters
    MULTI: int = Field(10, ge=1)
    WDSIZE: int = Field(4, ge=1)
    PGSIZE: int = Field(2048, ge=1)
    MINTER: float = Field(4.0, ge=0.0)
    CCT: float = Field(0.5, ge=0.0)
    ACCM: float = Field(0.0001, ge=0.0)
    TEST: float = Field(0.0007, ge=0.0)
    SEEK: float = Field(28.0, ge=0.0)
    LATENCY: float = Field(8.33, ge=0.0)
    TRANSFER: float = Field(1.28, ge=0.0)

    # Dynamic parameters
    NCL: int = Field(20, ge=1)
    NOBJ: int = Field(400, ge=1)
    MNVER: int = Field(3, ge=1)
    MNATTR: int = Field(10, ge=1)
    MSATTR: int = Field(1, ge=1)
    BUFSIZE: int = Field(10, ge=1)
    MAXDEPTH: int = Field(5, ge=1)
    PSUPER: float = Field(0.9, **_PROBABILITY)
    PCOMP: float = Field(0.5, **_PROBABILITY)
    PEQUI: float = Field(0.1, **_PROBABILITY)
    PQ1: float = Field(0.065, **_PROBABILITY)
    PQ2: float = Field(0.065, **_PROBABILITY)
    PQ3: float = Field(0.065, **_PROBABILITY)
    PQ4: float = Field(0.065, **_PROBABILITY)
    PQ5: float = Field(0.065, **_PROBABILITY)
    PQ6: float = Field(0.065, **_PROBABILITY)
    PQ7: float = Field(0.065, **_PROBABILITY)
    PQ8: float = Field(0.065, **_PROBABILITY)
    PQ9: float = Field(0.065, **_PROBABILITY)
    PQ10: float = Field(0.065, **_PROBABILITY)
    PQ11: float = Field(0.065, **_PROBABILITY)
    PQ12: float = Field(0.065, **_PROBABILITY)
    PU1: float | None = Field(None, **_PROBABILITY)
    PU2: float = Field(0.05, **_PROBABILITY)
    PCLUST: float | None = Field(None, **_PROBABILITY)

    # Run control
    seed: int = 0
    horizon_transactions: int = Field(2500, ge=0)
    replications: int = Field(5, ge=1)
    policy: PolicyName = PolicyName.CACTIS

    # Model details the tables leave open
    p_copy: float = Field(0.5, **_PROBABILITY)
    RANGE_SEL: float = Field(0.1, gt=0.0, le=1.0)
    OBJHDR_WORDS: int = Field(2, ge=0)

    ck: CkConfig = Field(default_factory=CkConfig)
    orion: OrionConfig = Field(default_factory=OrionConfig)

    @property
    def minter_ms(self) -> float:
        return self.MINTER * 1000.0

    @property
    def query_weights(self) -> list[float]:
        return [getattr(self, f"PQ{i}") for i in range(1, 13)]

    def effective_pu1(self) -> float:
        return 0.065 if self.PU1 is None else self.PU1

    def effective_pclust(self) -> float:
        if self.PCLUST is not None:
            return self.PCLUST
        # CK clusters at creation time only
        return 0.0 if self.policy == PolicyName.CK else 0.02

    def ck_storage_cost(self) -> float:
        if self.ck.storage_cost is not None:
            return self.ck.storage_cost
        return 1.0 / self.PGSIZE


def scaled_read_weights(config: SimConfig, r: float) -> SimConfig:
    """Multiply all twelve query weights by *r*, leaving PU1/PU2/PCLUST alone."""
    if r < 0:
        raise ValueError(f"read scaling factor must be >= 0, got {r}")
    update = {f"PQ{i}": getattr(config, f"PQ{i}") * r for i in range(1, 13)}
    return config.model_copy(update=update)


def isolate_query(config: SimConfig, query_index: int) -> SimConfig:
    """Config where only query ``PQ<query_index>`` runs (updates and reclustering off)."""
    if not 1 <= query_index <= 12:
        raise ValueError(f"query index must be in 1..12, got {query_index}")
    update: dict[str, float] = {f"PQ{i}": 0.0 for i in range(1, 13)}
    update[f"PQ{query_index}"] = 1.0
    update.update(PU1=0.0, PU2=0.0, PCLUST=0.0)
    return config.model_copy(update=update)


def env_diagnostics() -> dict[str, object]:
    """Snapshot of where the active runtime settings came from.

    pydantic-settings prefers OS env vars over the env file, so a stale
    ``LOG_LEVEL`` exported in the shell silently wins over the file.
    """
    overridden = sorted(
        name for name in Settings.model_fields if name.upper() in os.environ
    )
    return {
        "env_file": str(ENV_FILE_PATH),
        "env_file_exists": ENV_FILE_PATH.is_file(),
        "os_env_overrides": overridden,
    }
