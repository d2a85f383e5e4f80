"""
Library configuration loaded from environment variables (prefix FFCORR_).
"""
from pydantic_settings import BaseSettings
from pydantic import Field


class Settings(BaseSettings):
    """All tunable tolerances and limits, loaded from .env file or environment."""

    # --- Linear algebra ---
    dense_threshold: int = Field(default=4096, description="Largest dimension materialized densely")
    power_tol: float = Field(default=1e-12, description="Relative convergence tolerance for power iteration")
    power_max_iter: int = Field(default=5000, description="Iteration cap for power iteration")

    # --- Eigensolvers ---
    lanczos_tol: float = Field(default=1e-10, description="Residual tolerance per Lanczos eigenpair")
    lanczos_max_iter: int = Field(default=500, description="Largest Krylov space built per Lanczos run")
    solver_attempts: int = Field(default=3, description="Restarts (fresh seed) for iterative solvers")
    zero_tol_per_term: float = Field(default=1e-9, description="Zero-energy tolerance, multiplied by the term count")

    # --- Model checks ---
    commutator_tol: float = Field(default=1e-10, description="Frobenius tolerance separating commuting terms")
    term_tol: float = Field(default=1e-10, description="Tolerance for Hermiticity, min-eigenvalue and idempotency checks")

    # --- Bound checks ---
    bound_tol: float = Field(default=1e-9, description="Slack allowed on proven operator inequalities")
    remark_tol: float = Field(default=1e-8, description="Equality tolerance for the 1 - ||P-G|| = gap scan")
    cone_tol: float = Field(default=1e-10, description="Causal-cone identity tolerance")
    corr_tol: float = Field(default=1e-10, description="Agreement tolerance between XXZ correlators and their closed form")
    fit_floor: float = Field(default=1e-13, description="Correlator values at or below this are excluded from fits")

    # --- CLI ---
    max_sites: int = Field(default=14, description="Desk-scale guard on the site count (s=2)")
    default_seed: int = Field(default=1234)
    default_threads: int = Field(default=1)
    log_level: str = Field(default="WARNING")
    presets_path: str = Field(default="./data/presets.yaml")

    model_config = {"env_file": ".env", "env_file_encoding": "utf-8", "env_prefix": "FFCORR_"}


# Singleton settings instance
settings = Settings()
