"""
Verification Engine Configuration
Centralized settings with validation and fail-fast behavior.
"""

import sys
from contextlib import contextmanager
from functools import lru_cache

import click
from pydantic import field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Engine settings with validation.
    Loads from TOPOCHECK_* environment variables and a .env file.
    """

    model_config = SettingsConfigDict(
        env_prefix="TOPOCHECK_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",  # Ignore extra env vars
    )

    # ============ Carrier Limits ============
    # Hard caps; settings may only lower them
    MAX_CARRIER: int = 16
    BRUTE_LIMIT: int = 4
    PREORDER_LIMIT: int = 5

    # ============ Census ============
    CENSUS_WORKERS: int = 1
    CENSUS_CACHE_SIZE: int = 16

    # ============ Random / Fuzz ============
    RANDOM_MAX_SUBBASIS: int = 6
    FUZZ_CASES: int = 1000
    FUZZ_MIN_N: int = 5
    FUZZ_MAX_N: int = 10
    DEFAULT_SEED: int = 0

    # ============ Sweeps ============
    SWEEP_MAX_N: int = 3

    # ============ Diagnostics ============
    VERBOSE: bool = False

    @field_validator("MAX_CARRIER")
    @classmethod
    def cap_carrier(cls, v: int) -> int:
        if not 0 <= v <= 16:
            raise ValueError("MAX_CARRIER must lie in 0..16")
        return v

    @field_validator("BRUTE_LIMIT")
    @classmethod
    def cap_brute(cls, v: int) -> int:
        if not 0 <= v <= 4:
            raise ValueError("BRUTE_LIMIT must lie in 0..4 (2^(2^n) families)")
        return v

    @field_validator("PREORDER_LIMIT")
    @classmethod
    def cap_preorder(cls, v: int) -> int:
        if not 0 <= v <= 5:
            raise ValueError("PREORDER_LIMIT must lie in 0..5 (2^(n^2-n) relations)")
        return v

    @field_validator("CENSUS_WORKERS", "CENSUS_CACHE_SIZE")
    @classmethod
    def at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("FUZZ_MIN_N", "FUZZ_MAX_N", "SWEEP_MAX_N", "RANDOM_MAX_SUBBASIS", "FUZZ_CASES")
    @classmethod
    def non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("must not be negative")
        return v

    @model_validator(mode="after")
    def check_fuzz_range(self) -> "Settings":
        if self.FUZZ_MIN_N > self.FUZZ_MAX_N:
            raise ValueError("FUZZ_MIN_N must not exceed FUZZ_MAX_N")
        if self.FUZZ_MAX_N > self.MAX_CARRIER:
            raise ValueError("FUZZ_MAX_N must not exceed MAX_CARRIER")
        return self


@lru_cache()
def get_settings() -> Settings:
    """Process-wide settings, read from the environment once. Treat as read-only."""
    return Settings()


# Set for the duration of a CLI invocation by --verbose
_verbose_override = False


@contextmanager
def verbose_diagnostics():
    """Enable diagnostics until the block exits, whatever VERBOSE says."""
    global _verbose_override
    previous = _verbose_override
    _verbose_override = True
    try:
        yield
    finally:
        _verbose_override = previous


def log(tag: str, message: str) -> None:
    """Write a tagged diagnostic line to stderr when diagnostics are enabled."""
    if _verbose_override or get_settings().VERBOSE:
        click.echo(f"[{tag}] {message}", err=True)


def validate_settings_on_startup() -> Settings:
    """
    Load settings and exit with code 2 if the environment is invalid.
    The CLI calls this at import, before any command runs.
    """
    try:
        settings = get_settings()
        log("CONFIG", "Settings loaded successfully")
        log("CONFIG", f"Carrier cap: {settings.MAX_CARRIER}, brute limit: {settings.BRUTE_LIMIT}, "
                      f"preorder limit: {settings.PREORDER_LIMIT}")
        log("CONFIG", f"Census workers: {settings.CENSUS_WORKERS}, fuzz: {settings.FUZZ_CASES} cases "
                      f"at n={settings.FUZZ_MIN_N}..{settings.FUZZ_MAX_N}")
        return settings

    except Exception as e:
        click.echo("=" * 50, err=True)
        click.echo("[FATAL] Configuration validation failed!", err=True)
        click.echo(f"[FATAL] {str(e)}", err=True)
        click.echo("", err=True)
        click.echo("Settings are read from TOPOCHECK_* environment variables, e.g.", err=True)
        click.echo("  - TOPOCHECK_BRUTE_LIMIT: largest carrier for brute census (<= 4)", err=True)
        click.echo("  - TOPOCHECK_CENSUS_WORKERS: processes used by the brute census", err=True)
        click.echo("=" * 50, err=True)
        sys.exit(2)
