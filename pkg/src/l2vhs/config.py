from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    """Run-wide numeric settings. Fixed once at startup and passed around."""

    backend: str = "exact"  # "exact" or "float"
    tol: float = 1e-9
    order_cap: int = 1000
    # eigenvalues of defective blocks scatter like eps**(1/size) in floating point
    cluster_tol: float = 1e-3
    seed: int = 0
    samples: int = 16
    n_max: int = 32
    series_terms: int = 16

    def __post_init__(self):
        if self.backend not in ("exact", "float"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")

    @property
    def exact(self):
        return self.backend == "exact"

    def with_(self, **kw):
        return replace(self, **kw)


DEFAULT = Config()
