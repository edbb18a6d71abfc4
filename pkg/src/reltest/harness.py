"""Instance generation, certification and repeated-trial experiments.

Every trial draws its own instance and its own oracle seed from
``SeedSequence([seed, trial, stream])``, so a configuration plus a seed fixes
every record regardless of how trials are scheduled.
"""

from __future__ import annotations

import json
import math
import os
import random
import time
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from .boolfn import BooleanFunction, JuntaFunction, TruthTable, parity
from .fileformat import load_function
from .junta_tester import JuntaTesterParams, ParameterWarning, junta_test
from .oracle import QueryOracle
from .reldist import RelDist, rel_dist_to_juntas
from .subclass_catalog import SubclassSpec, table_bits
from .subclass_tester import SubclassTesterParams, subclass_test

MAX_CERTIFY_N = 16

# streams of SeedSequence([seed, trial, stream])
ORACLE_STREAM = 0
INSTANCE_STREAM = 1


def derive_seed(seed: int, trial: int, stream: int = ORACLE_STREAM) -> int:
    return int(np.random.SeedSequence([seed, trial, stream]).generate_state(1, np.uint64)[0])


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


# ---------------------------------------------------------------- instances

def class_spec(name: str, k: int) -> SubclassSpec:
    return SubclassSpec(name, k)


def random_placement(n: int, k: int, rng: random.Random) -> tuple[int, ...]:
    return tuple(rng.sample(range(1, n + 1), k))


def generate_member(spec: SubclassSpec, n: int, rng: random.Random) -> JuntaFunction:
    """A random member of ``C(k)``: uniform core from ``C(k)*`` (constant-0
    excluded) placed on a uniform injective variable map."""
    if spec.k > n:
        raise ValueError(f"k={spec.k} exceeds n={n}")
    tables = [t for t in spec.enumerate_core() if t]
    t = tables[rng.randrange(len(tables))]
    return JuntaFunction(n, random_placement(n, spec.k, rng), table_bits(t, spec.k))


def certify(f: BooleanFunction, spec: SubclassSpec) -> tuple[RelDist, BooleanFunction]:
    """Exact ``rel-dist(f, C(k))`` with a closest member."""
    if f.n > MAX_CERTIFY_N:
        raise ValueError(f"certification needs n <= {MAX_CERTIFY_N}")
    if spec.name == "juntas":
        return rel_dist_to_juntas(f, spec.k)
    return spec.distance(f)


class GeneratorExhausted(RuntimeError):
    pass


def _noisy_member(spec, n, eps, rng, retries):
    base = generate_member(spec, n, rng)
    t = base.table().copy()
    N = int(t.sum())
    batch = max(1, math.ceil(float(eps) * N / 10))
    for _ in range(retries):
        pts = [rng.randrange(1 << n) for _ in range(batch)]
        t[pts] ^= 1
        f = TruthTable(n, t)
        if f.count_ones() == 0:
            continue
        cert, _ = certify(f, spec)
        if cert.value > eps:
            return f, cert
    raise GeneratorExhausted("noise planting did not clear eps")


def generate_far(
    spec: SubclassSpec, n: int, eps: Fraction, rng: random.Random, retries: int = 200
) -> tuple[BooleanFunction, RelDist, str]:
    """A function with certified ``rel-dist(f, C(k)) > eps``.

    The source is picked at random among a parity on ``k+1`` variables, a
    member with planted noise, a uniformly random table and (for proper
    subclasses) a random k-junta outside the class.  Returns the function,
    its certificate and the source name.
    """
    eps = Fraction(eps)
    kinds = ("parity", "noise", "random") + (("junta",) if spec.name != "juntas" else ())
    kind = rng.choice(kinds)
    for _ in range(retries):
        if kind == "junta":
            f = generate_member(SubclassSpec("juntas", spec.k), n, rng)
        elif kind == "parity":
            f = parity(n, random_placement(n, min(spec.k + 1, n), rng))
        elif kind == "noise":
            try:
                f, cert = _noisy_member(spec, n, eps, rng, retries)
                return f, cert, kind
            except GeneratorExhausted:
                kind = "random"
                continue
        else:
            f = TruthTable(n, [rng.getrandbits(1) for _ in range(1 << n)])
        if f.count_ones() == 0:
            continue
        cert, _ = certify(f, spec)
        if cert.value > eps:
            return f, cert, kind
        kind = "random"
    raise GeneratorExhausted(f"no certified far instance after {retries} attempts")


# ---------------------------------------------------------------- experiments

@dataclass
class ExperimentConfig:
    tester: str = "junta"
    cls: str = "juntas"
    n: int = 16
    k: int = 2
    eps: Fraction = Fraction(1, 10)
    trials: int = 100
    seed: int = 0
    case: str = "yes"
    function: str | None = None
    out: str | None = None
    c_T: float = 6
    c_M: float = 24
    c_h: float = 8
    c1: float = 10
    c_fv: float = 3
    threshold: float = 0.60
    strict: bool = False
    timing: bool = False

    def __post_init__(self):
        if not isinstance(self.eps, Fraction):
            self.eps = Fraction(str(self.eps))
        if self.tester not in ("junta", "subclass"):
            raise ValueError("tester must be 'junta' or 'subclass'")
        if self.tester == "junta":
            self.cls = "juntas"
        if self.case not in ("yes", "no"):
            raise ValueError("case must be 'yes' or 'no'")
        if not 0 < self.eps < Fraction(1, 2):
            raise ValueError("eps must lie in (0, 1/2)")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be positive")
        if self.function is None:
            if self.k > self.n:
                raise ValueError("k exceeds n")
            if self.case == "no" and self.n > MAX_CERTIFY_N:
                raise ValueError(f"far instances need n <= {MAX_CERTIFY_N} for certification")
            if self.n > 62:
                raise ValueError("generated instances need n <= 62")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "class" in d:
            d["cls"] = d.pop("class")
        if "eps" in d:
            d["eps"] = Fraction(str(d["eps"]))
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    @property
    def spec(self) -> SubclassSpec:
        return SubclassSpec(self.cls, self.k)

    def tester_params(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ParameterWarning)
            if self.tester == "junta":
                return JuntaTesterParams(self.k, self.eps, self.c_T, self.c_M, self.c_h, strict=self.strict)
            return SubclassTesterParams(self.spec, self.eps, self.c1, self.c_fv, strict=self.strict)


def make_instance(cfg: ExperimentConfig, trial: int, fixed: BooleanFunction | None = None):
    """``(f, truth, certificate, source)`` for one trial."""
    if fixed is not None:
        return fixed, None, None, "file"
    rng = random.Random(derive_seed(cfg.seed, trial, INSTANCE_STREAM))
    if cfg.case == "yes":
        return generate_member(cfg.spec, cfg.n, rng), "member", None, "member"
    f, cert, kind = generate_far(cfg.spec, cfg.n, cfg.eps, rng)
    return f, "far", cert, kind


def run_trial(cfg: ExperimentConfig, trial: int, params=None, fixed=None, fixed_truth=None) -> dict:
    params = params if params is not None else cfg.tester_params()
    f, truth, cert, source = make_instance(cfg, trial, fixed)
    if fixed is not None:
        truth, cert = fixed_truth
    seed = derive_seed(cfg.seed, trial, ORACLE_STREAM)
    oracle = QueryOracle(f, seed=seed)
    start = time.perf_counter()
    if cfg.tester == "junta":
        v = junta_test(oracle, params)
    else:
        v = subclass_test(oracle, params)
    elapsed = time.perf_counter() - start
    rec: dict[str, Any] = {
        "trial": trial,
        "instance": trial if fixed is None else 0,
        "source": source,
        "truth": truth,
        "certified": None if cert is None else str(cert.value),
        **v.as_dict(),
        "seed": seed,
    }
    if cfg.timing:
        rec["wall_time"] = round(elapsed, 6)
    return rec


def _run_chunk(args) -> list[dict]:
    cfg, trials, fixed, fixed_truth = args
    params = cfg.tester_params()
    return [run_trial(cfg, t, params, fixed, fixed_truth) for t in trials]


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("RELTEST_THREADS", "1")))
    except ValueError:
        return 1


def _classify_fixed(cfg: ExperimentConfig, f: BooleanFunction):
    if f.n > MAX_CERTIFY_N or f.count_ones() == 0:
        return "unknown", None
    cert, _ = certify(f, cfg.spec)
    if cert.sym_diff == 0:
        return "member", None
    if cert.value > cfg.eps:
        return "far", cert
    return "near", cert


def run_records(cfg: ExperimentConfig, workers: int | None = None) -> list[dict]:
    fixed = load_function(cfg.function) if cfg.function else None
    fixed_truth = _classify_fixed(cfg, fixed) if fixed is not None else None
    workers = workers or thread_count()
    ids = list(range(cfg.trials))
    if workers <= 1 or cfg.trials < 2:
        records = _run_chunk((cfg, ids, fixed, fixed_truth))
    else:
        chunks = [ids[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [(cfg, c, fixed, fixed_truth) for c in chunks if c])
            records = [r for part in parts for r in part]
    records.sort(key=lambda r: r["trial"])
    return records


def summarize(cfg: ExperimentConfig, records: list[dict]) -> dict:
    params = cfg.tester_params()
    n = len(records)
    accepted = sum(r["verdict"] == "accept" for r in records)
    want_accept = cfg.case == "yes"
    correct = accepted if want_accept else n - accepted
    lo, hi = wilson_interval(correct, n)
    alo, ahi = wilson_interval(accepted, n)
    totals = [r["total"] for r in records]
    hist = Counter(f"{r['verdict']}:{r['phase']}:{r['reason']}" for r in records)
    max_total = max(totals)
    budget = params.budget
    out = {
        "summary": True,
        "tester": cfg.tester,
        "class": cfg.cls,
        "n": cfg.n,
        "k": cfg.k,
        "eps": str(cfg.eps),
        "case": cfg.case,
        "trials": n,
        "accepted": accepted,
        "accept_rate": accepted / n,
        "accept_wilson": [alo, ahi],
        "correct_rate": correct / n,
        "correct_wilson": [lo, hi],
        "mean_mq": sum(r["mq"] for r in records) / n,
        "mean_samp": sum(r["samp"] for r in records) / n,
        "mean_total": sum(totals) / n,
        "max_mq": max(r["mq"] for r in records),
        "max_samp": max(r["samp"] for r in records),
        "max_total": max_total,
        "budget": budget,
        "scale": params.scale,
        "achieved_constant": max_total / params.scale,
        "phases": dict(sorted(hist.items())),
        "threshold": cfg.threshold,
    }
    out["pass"] = bool(lo >= cfg.threshold and max_total <= budget)
    return out


def write_jsonl(records: Iterable[dict], summary: dict, path: str) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r, sort_keys=True) + "\n")
        fh.write(json.dumps(summary, sort_keys=True) + "\n")


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> tuple[dict, list[dict]]:
    records = run_records(cfg, workers)
    summary = summarize(cfg, records)
    if cfg.out:
        write_jsonl(records, summary, cfg.out)
    return summary, records


def config_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["eps"] = str(cfg.eps)
    return d
