"""Staged classification of knots, batch census runs and the G_n probe.

A knot is trivially valued as soon as some truncation G_k(K) is shown to be
finite, whatever its order. Stages run in order and stop at the first
finite result; a confluent system with infinitely many normal forms only
means that truncation is infinite, so the next stage still runs.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import knuthbendix as kb
from . import toddcoxeter as tc
from .fpgroup import Presentation, abelianization_invariants, build_Gk, build_Gnk
from .knotcodes import GaussCode, GaussCodeError, knot_presentation, parse_gauss_code, read_census

FINITE = "FINITE"
INFINITE = "INFINITE"
OVERFLOW = "OVERFLOW"
TIMEOUT = "TIMEOUT"

TRIVIALLY_VALUED = "trivially_valued"
UNRESOLVED = "unresolved"
PARSE_ERROR = "parse_error"


@dataclass(frozen=True)
class Stage:
    method: str                       # "tc" or "kb"
    depth: int
    limits: tc.TcLimits | kb.KbLimits

    def __post_init__(self):
        if self.method not in ("tc", "kb"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        want = tc.TcLimits if self.method == "tc" else kb.KbLimits
        if not isinstance(self.limits, want):
            raise TypeError(f"{self.method} stage needs {want.__name__}")

    def describe(self) -> str:
        if self.method == "tc":
            return f"TC k={self.depth} max_cosets={self.limits.max_cosets}"
        secs = self.limits.max_seconds
        budget = "no time limit" if secs is None else f"{secs:g}s"
        return f"KB k={self.depth} {budget}"


@dataclass(frozen=True)
class StageConfig:
    stages: tuple[Stage, ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("a stage list must not be empty")
        depths = [s.depth for s in self.stages]
        if depths != sorted(depths):
            raise ValueError("stage depths must be nondecreasing")

    @classmethod
    def default(cls) -> "StageConfig":
        """TC at depth 0, then KB at depths 0, 1 (timed) and 2 (until it stalls)."""
        kb_timed = kb.KbLimits.from_env()
        return cls((
            Stage("tc", 0, tc.TcLimits.from_env()),
            Stage("kb", 0, kb_timed),
            Stage("kb", 1, kb_timed),
            Stage("kb", 2, kb.KbLimits(max_seconds=None)),
        ))

    @classmethod
    def from_dict(cls, data: dict) -> "StageConfig":
        """Build from ``{"stages": [{"method", "depth", <limit fields>...}]}``."""
        stages = []
        for item in data["stages"]:
            item = dict(item)
            method = item.pop("method").lower()
            depth = int(item.pop("depth"))
            limit_cls = tc.TcLimits if method == "tc" else kb.KbLimits
            stages.append(Stage(method, depth, limit_cls(**item)))
        return cls(tuple(stages))

    @classmethod
    def from_json(cls, path: str | os.PathLike) -> "StageConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {"stages": [dict(method=s.method, depth=s.depth, **asdict(s.limits))
                           for s in self.stages]}


@dataclass
class StageOutcome:
    """``result`` is FINITE, INFINITE, OVERFLOW or TIMEOUT.

    ``detail`` is the engine's own wording ("INDEX = 2", "OVERFLOW",
    "no_progress", ...). A KB run stopped by a rule-count, rule-length or
    no-progress bound counts as OVERFLOW: a resource bound, not a clock.
    """

    method: str
    depth: int
    result: str
    order: int | None = None
    detail: str = ""
    seconds: float = 0.0

    def to_dict(self, timings: bool = False) -> dict:
        d = {"method": self.method.upper(), "depth": self.depth, "result": self.result}
        if self.order is not None:
            d["order"] = self.order
        d["detail"] = self.detail
        if timings:
            d["seconds"] = round(self.seconds, 3)
        return d


@dataclass
class KnotVerdict:
    line: int
    code: str
    crossings: int | None
    stages: list[StageOutcome] = field(default_factory=list)
    status: str = UNRESOLVED
    order: int | None = None
    stage: int | None = None          # 1-based index of the proving stage
    error: str | None = None

    @property
    def nonstandard_order(self) -> bool:
        return self.order is not None and self.order != 2

    def to_dict(self, timings: bool = False) -> dict:
        d = {"line": self.line, "code": self.code, "crossings": self.crossings,
             "stages": [s.to_dict(timings) for s in self.stages], "status": self.status}
        if self.order is not None:
            d["order"] = self.order
            d["stage"] = self.stage
            d["nonstandard_order"] = self.nonstandard_order
        if self.error is not None:
            d["error"] = self.error
        return d

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), separators=(",", ":"))


def run_stage(p: Presentation, stage: Stage) -> StageOutcome:
    t0 = time.monotonic()
    if stage.method == "tc":
        enum = tc.order(p, stage.limits)
        result = {"index": FINITE, "overflow": OVERFLOW, "timeout": TIMEOUT}[enum.status]
        out = StageOutcome("tc", stage.depth, result, enum.index, str(enum))
    else:
        comp = kb.complete(p, limits=stage.limits)
        if comp.confluent:
            m = comp.system.count_irreducible()
            out = StageOutcome("kb", stage.depth, FINITE if m else INFINITE, m,
                               f"CONFLUENT rules={len(comp.system)}")
        else:
            # a clock stop leaves a machine-dependent rule count, so omit it
            if comp.status == "timeout":
                out = StageOutcome("kb", stage.depth, TIMEOUT, None, "timeout")
            else:
                out = StageOutcome("kb", stage.depth, OVERFLOW, None,
                                   f"{comp.status} rules={len(comp.system)}")
    out.seconds = time.monotonic() - t0
    return out


def _check_finite(p: Presentation, m: int) -> None:
    # every truncation abelianizes to Z/2, so a finite one has even order >= 2
    if m < 2 or m % 2 or abelianization_invariants(p) != [2]:
        raise RuntimeError(f"finite order {m} contradicts the Z/2 abelianization")


def classify(gc: GaussCode, cfg: StageConfig | None = None, line: int = 1) -> KnotVerdict:
    """Run the stages on one knot, stopping at the first finite truncation."""
    cfg = cfg or StageConfig.default()
    base = knot_presentation(gc)
    cache: dict[int, Presentation] = {}
    verdict = KnotVerdict(line, str(gc), gc.crossings)
    for i, stage in enumerate(cfg.stages, start=1):
        if stage.depth not in cache:
            cache[stage.depth] = build_Gk(base, stage.depth)
        p = cache[stage.depth]
        out = run_stage(p, stage)
        verdict.stages.append(out)
        if out.result == FINITE:
            _check_finite(p, out.order)
            verdict.status = TRIVIALLY_VALUED
            verdict.order = out.order
            verdict.stage = i
            break
    return verdict


def classify_line(line: int, text: str, cfg: StageConfig) -> KnotVerdict:
    """Parse and classify one census line; parse faults become a verdict."""
    try:
        gc = parse_gauss_code(text)
    except GaussCodeError as e:
        return KnotVerdict(line, text.strip(), None, status=PARSE_ERROR, error=str(e))
    return classify(gc, cfg, line)


def _classify_task(args) -> KnotVerdict:
    line, text, cfg = args
    return classify_line(line, text, cfg)


@dataclass
class BatchReport:
    totals: dict[str, int]
    per_stage: dict[int, int]
    failures: list[str]
    parse_errors: list[tuple[int, str]]
    lines: int
    seconds: float
    nonstandard_orders: list[tuple[int, int]] = field(default_factory=list)

    def __str__(self) -> str:
        out = [f"knots: {self.lines}"]
        out += [f"  {k}: {v}" for k, v in self.totals.items()]
        for i, n in sorted(self.per_stage.items()):
            out.append(f"  resolved at stage {i}: {n}")
        for line, m in self.nonstandard_orders:
            out.append(f"  line {line}: finite truncation of order {m} (not 2)")
        for line, msg in self.parse_errors:
            out.append(f"  line {line}: {msg}")
        out.append(f"wall time: {self.seconds:.1f}s")
        return "\n".join(out)


def summarize(verdicts: Sequence[KnotVerdict], seconds: float = 0.0) -> BatchReport:
    totals = {TRIVIALLY_VALUED: 0, UNRESOLVED: 0, PARSE_ERROR: 0}
    per_stage: dict[int, int] = {}
    for v in verdicts:
        totals[v.status] += 1
        if v.stage is not None:
            per_stage[v.stage] = per_stage.get(v.stage, 0) + 1
    return BatchReport(
        totals=totals,
        per_stage=per_stage,
        failures=[v.code for v in verdicts if v.status == UNRESOLVED],
        parse_errors=[(v.line, v.error) for v in verdicts if v.status == PARSE_ERROR],
        lines=len(verdicts),
        seconds=seconds,
        nonstandard_orders=[(v.line, v.order) for v in verdicts if v.nonstandard_order],
    )


def classify_lines(lines: Iterable[str], cfg: StageConfig | None = None,
                   workers: int | None = None, chunksize: int = 1):
    """Yield verdicts for the non-blank lines, in input order."""
    cfg = cfg or StageConfig.default()
    tasks = [(line, text, cfg) for line, text in read_census(lines)]
    workers = workers or os.cpu_count() or 1
    if workers == 1 or len(tasks) <= 1:
        yield from map(_classify_task, tasks)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order whatever the completion order
        yield from pool.map(_classify_task, tasks, chunksize=chunksize)


def run_census(input_path: str | os.PathLike, cfg: StageConfig | None = None,
               workers: int | None = None, output_path: str | os.PathLike | None = None,
               fail_path: str | os.PathLike | None = None, timings: bool = False,
               progress=None) -> BatchReport:
    """Classify every line of a census file.

    Writes one JSON object per knot to ``output_path`` and the raw codes of
    unresolved knots to ``fail_path``. Stage timings are left out of the
    JSON unless ``timings`` is set, so the output is reproducible.
    """
    t0 = time.monotonic()
    with open(input_path, encoding="utf-8") as f:
        lines = f.readlines()
    verdicts = []
    out = open(output_path, "w", encoding="utf-8") if output_path else None
    try:
        for v in classify_lines(lines, cfg, workers):
            verdicts.append(v)
            if out:
                out.write(v.to_json(timings) + "\n")
                out.flush()
            if progress:
                progress(v)
    finally:
        if out:
            out.close()
    report = summarize(verdicts, time.monotonic() - t0)
    if fail_path:
        Path(fail_path).write_text("".join(c + "\n" for c in report.failures),
                                   encoding="utf-8")
    return report


@dataclass
class ProbeAttempt:
    round: int
    depth: int
    budget: int
    result: str
    order: int | None
    seconds: float


@dataclass
class ProbeResult:
    """``depth`` is the least k found with G_{n,k} finite, or None."""

    n: int
    kmax: int
    attempts: list[ProbeAttempt]
    depth: int | None
    order: int | None

    @property
    def conclusive(self) -> bool:
        return self.depth is not None

    def __str__(self) -> str:
        if self.depth is None:
            return f"INCONCLUSIVE n={self.n} kmax={self.kmax}"
        return f"FINITE n={self.n} k={self.depth} order={self.order}"


def probe_gn(n: int, kmax: int, start_cosets: int = 100_000,
             max_cosets: int = tc.DEFAULT_MAX_COSETS, strategy: str = "hlt",
             max_seconds: float | None = None, progress=None) -> ProbeResult:
    """Search for a finite G_{n,k}, k <= kmax, with staggered coset budgets.

    In round r every depth k <= r is tried with ``start_cosets * 2**(r - k)``
    cosets (capped at ``max_cosets``), so deeper truncations join later with
    smaller budgets and all budgets double each round. The probe stops after
    the first round with a finite result, or once every depth has failed at
    the cap. Failure is never read as infiniteness.
    """
    if n < 1 or kmax < 0:
        raise ValueError("need n >= 1 and kmax >= 0")
    presentations: dict[int, Presentation] = {}
    attempts: list[ProbeAttempt] = []
    exhausted: set[int] = set()
    r = 0
    while len(exhausted) <= kmax:
        found = []
        for k in range(min(r, kmax) + 1):
            if k in exhausted:
                continue
            budget = min(start_cosets * 2 ** (r - k), max_cosets)
            if k not in presentations:
                presentations[k] = build_Gnk(n, k)
            t0 = time.monotonic()
            enum = tc.order(presentations[k], tc.TcLimits(budget, max_seconds), strategy)
            att = ProbeAttempt(r, k, budget, str(enum), enum.index, time.monotonic() - t0)
            attempts.append(att)
            if progress:
                progress(att)
            if enum.finite:
                found.append((k, enum.index))
            elif budget >= max_cosets:
                exhausted.add(k)
        if found:
            k, m = min(found)
            return ProbeResult(n, kmax, attempts, k, m)
        r += 1
    return ProbeResult(n, kmax, attempts, None, None)
