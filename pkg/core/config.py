import os
from pydantic_settings import BaseSettings
from typing import Optional

env = os.getenv("ENV", "development")
file_map = {
    "development": ".env",
    "uat": ".env.uat",
    "production": ".env.production",
}
env_file_path = file_map.get(env, ".env")


class Settings(BaseSettings):
    # App settings
    app_name: str = "Optomechanical Cat State Simulator"
    app_version: str = "1.0.0"
    debug: bool = False
    host: str = "127.0.0.1"
    port: int = 8000
    environment: str = env

    # Phase-space term algebra
    merge_key_tolerance: float = 1e-9
    merge_drop_relative: float = 1e-12
    imaginary_tolerance: float = 1e-10
    normalization_tolerance: float = 1e-10

    # Evaluation grids
    grid_sigma_span: float = 6.0
    grid_samples_per_period: int = 8
    max_grid_points: int = 4097

    # Measures
    measure_sigma_span: float = 6.5
    cfi_zero_threshold: float = 1e-13
    cfi_relative_tolerance: float = 1e-8
    lambda_scan_points: int = 181
    delta_tolerance: float = 2e-5
    min_w_tolerance: float = 1e-9

    # Decoherence / loss
    feasibility_threshold: float = 10.0
    loss_tail_epsilon: float = 1e-10

    # Pulse integral
    pulse_relative_tolerance: float = 1e-8
    pulse_envelope_cutoff: float = 1e-9

    # Fock-basis oracle
    fock_leakage_tolerance: float = 1e-8
    fock_physicality_tolerance: float = 1e-9
    fock_hermite_order: int = 40
    fock_max_hermite_order: int = 320
    fock_max_dimension: int = 1024

    # Experiment runs
    output_dir: str = "out"
    workers: int = 0  # 0 = one per core
    table1_path: Optional[str] = None
    default_runs: int = 1000

    # Logging settings
    log_level: str = "INFO"
    log_format: str = "%(message)s"

    class Config:
        env_file = env_file_path
        env_file_encoding = "utf-8"
        case_sensitive = False  # Allows both LOG_LEVEL and log_level
        extra = "ignore"  # Ignore extra fields instead of raising validation errors


settings = Settings()
