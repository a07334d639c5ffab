import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

from core.errors import InvalidParameters
from core.indices import IndexTuple, parse_index, render_index
from core.tower import TowerOptions, parse_gate
from core.vanishing import DEFAULT_DEPTH

OUT_ENV = "GRASSMANN_BLOWUP_OUT"


def default_out_dir() -> str:
    return os.environ.get(OUT_ENV, "results")


def parse_index_list(text: Optional[str], n: int = 9, d: Optional[int] = None) -> List[IndexTuple]:
    """
    "34,13" -> [(3, 4), (1, 3)]; при n > 9 кортежі записуються через крапку: "1.10,2.3".
    Якщо задано d > 1 і рядок складається рівно з d окремих чисел, це один кортеж: "3,4" -> [(3, 4)].
    """
    if text is None or not text.strip():
        return []
    parts = [part.strip() for part in text.split(",") if part.strip()]
    single = all(part.isdigit() and (n > 9 or len(part) == 1) for part in parts)
    if d is not None and d > 1 and len(parts) == d and single:
        return [parse_index(".".join(parts), n)]
    return [parse_index(part, n) for part in parts]


def parse_primes(text: str) -> Tuple[int, ...]:
    try:
        primes = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise InvalidParameters(f"cannot parse prime list '{text}'")
    for p in primes:
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise InvalidParameters(f"{p} is not a prime")
    if not primes:
        raise InvalidParameters("prime list is empty")
    return primes


@dataclass
class RunConfig:
    """Параметри запуску; перевіряються до будь-яких обчислень і записуються в маніфест без змін."""
    d: int
    n: int
    m: IndexTuple
    lambda_o: str = "all"
    gamma: List[IndexTuple] = field(default_factory=list)
    matroid_path: Optional[str] = None
    matroid_convention: str = "rank"
    primes: Tuple[int, ...] = (3, 5, 7)
    gate: str = "nonempty"
    max_charts: int = 20000
    exhaustive_threshold: int = 14
    sample_budget: int = 100000
    seed: int = 0
    quotient_bound: int = 3
    truncate_after: Optional[str] = None
    prune: bool = True
    certificate_depth: int = DEFAULT_DEPTH
    n_jobs: int = 1
    out_dir: str = field(default_factory=default_out_dir)
    verbose: bool = False

    def __post_init__(self):
        if not (1 <= self.d < self.n):
            raise InvalidParameters(f"require 1 ≤ d < n, got d={self.d}, n={self.n}")
        self.m = tuple(self.m)
        if len(self.m) != self.d or list(self.m) != sorted(set(self.m)) or not all(1 <= i <= self.n for i in self.m):
            raise InvalidParameters(f"m={self.m} must be an increasing {self.d}-subset of [1, {self.n}]")
        self.gamma = [tuple(u) for u in self.gamma]
        if self.gamma and self.matroid_path:
            raise InvalidParameters("give either --gamma or --matroid, not both")
        if self.matroid_convention not in ("rank", "intersection"):
            raise InvalidParameters(f"unknown matroid convention '{self.matroid_convention}'")
        self.primes = tuple(self.primes)
        parse_primes(",".join(map(str, self.primes)))
        parse_gate(self.gate)
        if self.truncate_after not in (None, "theta", "wp"):
            raise InvalidParameters("--truncate-after takes 'theta' or 'wp'")
        for name in ("max_charts", "exhaustive_threshold", "sample_budget", "quotient_bound"):
            if getattr(self, name) < 1:
                raise InvalidParameters(f"{name} must be positive")
        if self.certificate_depth < 0:
            raise InvalidParameters("--certificate-depth must be non-negative")
        if self.n_jobs == 0:
            raise InvalidParameters("--jobs must be nonzero")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        n = args.n
        return cls(
            d=args.d,
            n=n,
            m=parse_index(args.m.replace(",", "."), n),
            lambda_o=getattr(args, "lambda_o", "all"),
            gamma=parse_index_list(getattr(args, "gamma", None), n, args.d),
            matroid_path=getattr(args, "matroid", None),
            matroid_convention=getattr(args, "matroid_convention", "rank"),
            primes=parse_primes(getattr(args, "primes", "3,5,7")),
            gate=getattr(args, "gate", "nonempty"),
            max_charts=getattr(args, "max_charts", 20000),
            exhaustive_threshold=getattr(args, "exhaustive_threshold", 14),
            sample_budget=getattr(args, "sample_budget", 100000),
            seed=getattr(args, "seed", 0),
            quotient_bound=getattr(args, "quotient_bound", 3),
            truncate_after=getattr(args, "truncate_after", None),
            prune=not getattr(args, "no_prune", False),
            certificate_depth=getattr(args, "certificate_depth", DEFAULT_DEPTH),
            n_jobs=getattr(args, "jobs", 1),
            out_dir=getattr(args, "out", None) or default_out_dir(),
            verbose=getattr(args, "verbose", False),
        )

    def tower_options(self) -> TowerOptions:
        return TowerOptions(
            gate=self.gate,
            primes=self.primes,
            max_charts=self.max_charts,
            exhaustive_threshold=self.exhaustive_threshold,
            sample_budget=self.sample_budget,
            seed=self.seed,
            truncate_after=self.truncate_after,
            prune=self.prune,
            certificate_depth=self.certificate_depth,
            n_jobs=self.n_jobs,
            verbose=self.verbose,
        )

    def point_options(self) -> dict:
        return {"exhaustive_threshold": self.exhaustive_threshold, "sample_budget": self.sample_budget,
                "seed": self.seed}

    def to_dict(self) -> dict:
        data = asdict(self)
        data["m"] = render_index(self.m)
        data["gamma"] = [render_index(u) for u in self.gamma]
        data["primes"] = list(self.primes)
        # вихідний каталог і детальність не впливають на результат
        data.pop("out_dir")
        data.pop("verbose")
        return data

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.md5(canonical.encode("utf-8")).hexdigest()
