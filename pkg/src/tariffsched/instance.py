"""Problem data model: tariffs, jobs, instances, reservation profiles, schedules.

All numeric values that enter an objective are :class:`fractions.Fraction`.
An infinite tariff is represented by ``math.inf``, which compares above every
``Fraction`` and is never selected by any solver.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

INF = math.inf


class InstanceParseError(ValueError):
    """Raised when an instance document does not match the schema."""


class InvalidInstance(ValueError):
    """Raised when a parsed instance violates its invariants."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid instance: " + "; ".join(self.violations))


class InsufficientCapacity(Exception):
    """Not enough finite-cost slots to host the requested processing."""


def is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x)


def to_fraction(value: Any, *, allow_inf: bool = False, where: str = "value"):
    """Parse an int, an ``"a/b"`` string, or (optionally) ``"inf"``."""
    if allow_inf and isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
        return INF
    if isinstance(value, bool):
        raise InstanceParseError(f"{where}: expected rational, got boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if allow_inf and math.isinf(value) and value > 0:
            return INF
        if not math.isfinite(value):
            raise InstanceParseError(f"{where}: non-finite number {value!r}")
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceParseError(f"{where}: cannot parse rational {value!r}") from exc
    raise InstanceParseError(f"{where}: expected rational, got {type(value).__name__}")


def format_rational(x) -> str:
    if is_inf(x):
        return "inf"
    return str(Fraction(x))


@dataclass(frozen=True)
class TariffInterval:
    start: int
    end: int
    cost: Fraction | float

    @property
    def length(self) -> int:
        return self.end - self.start

    @property
    def finite(self) -> bool:
        return not is_inf(self.cost)


@dataclass(frozen=True)
class TariffFunction:
    """Piecewise-constant slot cost over ``[0, horizon)``.

    Adjacent intervals with equal cost are kept distinct.
    """

    intervals: tuple[TariffInterval, ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[int, int, Any]]) -> "TariffFunction":
        out = []
        for s, d, e in triples:
            cost = INF if is_inf(e) or (isinstance(e, str) and e == "inf") else Fraction(e)
            out.append(TariffInterval(int(s), int(d), cost))
        return cls(tuple(out))

    @property
    def K(self) -> int:
        return len(self.intervals)

    @property
    def horizon(self) -> int:
        return self.intervals[-1].end if self.intervals else 0

    @property
    def finite_capacity(self) -> int:
        return sum(iv.length for iv in self.intervals if iv.finite)

    def interval_index(self, t: int) -> int:
        """Index of the interval containing slot ``t`` (binary search)."""
        lo, hi = 0, len(self.intervals) - 1
        if t < 0 or t >= self.horizon:
            raise IndexError(f"slot {t} outside horizon [0, {self.horizon})")
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.intervals[mid].start <= t:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def violations(self) -> list[str]:
        out = []
        if not self.intervals:
            return ["tariff: at least one interval required"]
        if self.intervals[0].start != 0:
            out.append(f"tariff: first interval starts at {self.intervals[0].start}, expected 0")
        for k, iv in enumerate(self.intervals):
            if iv.start < 0 or iv.end < 0:
                out.append(f"tariff[{k}]: negative bound")
            if iv.start >= iv.end:
                out.append(f"tariff[{k}]: start {iv.start} >= end {iv.end}")
            if iv.finite and iv.cost < 0:
                out.append(f"tariff[{k}]: negative cost {iv.cost}")
            if k > 0 and self.intervals[k - 1].end != iv.start:
                out.append(
                    f"tariff[{k}]: contiguity violation, previous end "
                    f"{self.intervals[k - 1].end} != start {iv.start}"
                )
        return out


@dataclass(frozen=True)
class Job:
    id: int
    p: int
    w: Fraction = Fraction(0)
    p_per_machine: tuple[int | float, ...] | None = None

    def processing_on(self, machine: int) -> int | float:
        if self.p_per_machine is None:
            return self.p
        return self.p_per_machine[machine]

    def min_processing(self) -> int | float:
        if self.p_per_machine is None:
            return self.p
        return min(self.p_per_machine)


@dataclass(frozen=True)
class Instance:
    jobs: tuple[Job, ...]
    tariff: TariffFunction
    machines: int = 1

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))

    @property
    def n(self) -> int:
        return len(self.jobs)

    def job(self, job_id: int) -> Job:
        for j in self.jobs:
            if j.id == job_id:
                return j
        raise KeyError(job_id)

    def total_processing(self) -> int:
        return sum(j.p for j in self.jobs)

    def with_tariff(self, tariff: TariffFunction) -> "Instance":
        return Instance(self.jobs, tariff, self.machines)

    def with_unit_weights(self) -> "Instance":
        jobs = tuple(Job(j.id, j.p, Fraction(1), j.p_per_machine) for j in self.jobs)
        return Instance(jobs, self.tariff, self.machines)


@dataclass(frozen=True)
class ReservationProfile:
    """Per-interval count of utilized slots; the first ``counts[k]`` slots of I_k are used."""

    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    @property
    def capacity(self) -> int:
        return sum(self.counts)

    def slots(self, tariff: TariffFunction) -> list[int]:
        out = []
        for iv, c in zip(tariff.intervals, self.counts):
            out.extend(range(iv.start, iv.start + c))
        return out

    def cost(self, tariff: TariffFunction) -> Fraction | float:
        total = Fraction(0)
        for iv, c in zip(tariff.intervals, self.counts):
            if c:
                total += c * iv.cost
        return total

    def violations(self, tariff: TariffFunction) -> list[str]:
        out = []
        if len(self.counts) != tariff.K:
            return [f"profile has {len(self.counts)} counts for {tariff.K} intervals"]
        for k, (iv, c) in enumerate(zip(tariff.intervals, self.counts)):
            if c < 0 or c > iv.length:
                out.append(f"profile[{k}]={c} outside [0, {iv.length}]")
            if c and not iv.finite:
                out.append(f"profile[{k}] utilizes an infinite-cost interval")
        return out

    @classmethod
    def from_slots(cls, slots: Iterable[int], tariff: TariffFunction) -> "ReservationProfile":
        counts = [0] * tariff.K
        for t in slots:
            counts[tariff.interval_index(t)] += 1
        return cls(tuple(counts))


@dataclass(frozen=True)
class Segment:
    job: int
    machine: int
    start: Fraction
    end: Fraction


@dataclass(frozen=True)
class Schedule:
    objective: str
    segments: tuple[Segment, ...]
    completion_times: Mapping[int, Fraction]
    profile: ReservationProfile
    scheduling_cost: Fraction
    tariff_cost: Fraction
    total_cost: Fraction = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "completion_times", dict(self.completion_times))
        total = self.scheduling_cost + self.tariff_cost
        if self.total_cost is None:
            object.__setattr__(self, "total_cost", total)
        elif self.total_cost != total:
            raise ValueError("total_cost must equal scheduling_cost + tariff_cost")

    @property
    def makespan(self) -> Fraction:
        return max((s.end for s in self.segments), default=Fraction(0))

    def sequence(self) -> list[int]:
        """Job ids by completion time (single-machine reading order)."""
        return sorted(self.completion_times, key=lambda j: (self.completion_times[j], j))


def validate(instance: Instance) -> list[str]:
    """Return every violated invariant; an empty list means well-formed and feasible."""
    out = list(instance.tariff.violations())
    if instance.machines < 1:
        out.append(f"machines must be >= 1, got {instance.machines}")
    seen = set()
    for j in instance.jobs:
        if j.id in seen:
            out.append(f"job {j.id}: duplicate id")
        seen.add(j.id)
        if j.p < 1:
            out.append(f"job {j.id}: processing time {j.p} < 1")
        if j.w < 0:
            out.append(f"job {j.id}: negative weight {j.w}")
        if j.p_per_machine is not None:
            if len(j.p_per_machine) != instance.machines:
                out.append(
                    f"job {j.id}: p_per_machine has {len(j.p_per_machine)} entries "
                    f"for {instance.machines} machines"
                )
            finite = [q for q in j.p_per_machine if not is_inf(q)]
            if not finite:
                out.append(f"job {j.id}: no machine with finite processing time")
            if any(q < 1 for q in finite):
                out.append(f"job {j.id}: p_per_machine entries must be >= 1")
    if out:
        return out
    need = sum(j.min_processing() for j in instance.jobs)
    cap = instance.tariff.finite_capacity
    if cap < need:
        out.append(f"feasibility violation: finite capacity {cap} < required {need}")
    return out


# --- JSON ---------------------------------------------------------------------------------


def _require(doc: Mapping, key: str, where: str):
    if key not in doc:
        raise InstanceParseError(f"{where}: missing field {key!r}")
    return doc[key]


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceParseError(f"{where}: expected integer, got {value!r}")
    return value


def instance_from_dict(doc: Mapping) -> Instance:
    if not isinstance(doc, Mapping):
        raise InstanceParseError("document: expected a JSON object")
    machines = _as_int(_require(doc, "machines", "document"), "machines")
    raw_jobs = _require(doc, "jobs", "document")
    raw_tariff = _require(doc, "tariff", "document")
    if not isinstance(raw_jobs, list):
        raise InstanceParseError("jobs: expected a list")
    if not isinstance(raw_tariff, list):
        raise InstanceParseError("tariff: expected a list")
    jobs = []
    for idx, rj in enumerate(raw_jobs):
        where = f"jobs[{idx}]"
        if not isinstance(rj, Mapping):
            raise InstanceParseError(f"{where}: expected an object")
        jid = _as_int(_require(rj, "id", where), f"{where}.id")
        p = _as_int(_require(rj, "p", where), f"{where}.p")
        w = to_fraction(rj.get("w", 0), where=f"{where}.w")
        ppm = None
        if rj.get("p_per_machine") is not None:
            raw = rj["p_per_machine"]
            if not isinstance(raw, list):
                raise InstanceParseError(f"{where}.p_per_machine: expected a list")
            vals = []
            for m, q in enumerate(raw):
                if isinstance(q, str) and q.strip().lower() == "inf":
                    vals.append(INF)
                else:
                    vals.append(_as_int(q, f"{where}.p_per_machine[{m}]"))
            ppm = tuple(vals)
        jobs.append(Job(jid, p, w, ppm))
    intervals = []
    for idx, rt in enumerate(raw_tariff):
        where = f"tariff[{idx}]"
        if not isinstance(rt, Mapping):
            raise InstanceParseError(f"{where}: expected an object")
        s = _as_int(_require(rt, "start", where), f"{where}.start")
        d = _as_int(_require(rt, "end", where), f"{where}.end")
        e = to_fraction(_require(rt, "cost", where), allow_inf=True, where=f"{where}.cost")
        intervals.append(TariffInterval(s, d, e))
    return Instance(tuple(jobs), TariffFunction(tuple(intervals)), machines)


def instance_to_dict(instance: Instance) -> dict:
    jobs = []
    for j in instance.jobs:
        d: dict[str, Any] = {"id": j.id, "p": j.p, "w": _json_rational(j.w)}
        if j.p_per_machine is not None:
            d["p_per_machine"] = ["inf" if is_inf(q) else int(q) for q in j.p_per_machine]
        jobs.append(d)
    tariff = [
        {"start": iv.start, "end": iv.end, "cost": _json_rational(iv.cost)}
        for iv in instance.tariff.intervals
    ]
    return {"machines": instance.machines, "jobs": jobs, "tariff": tariff}


def _json_rational(x):
    if is_inf(x):
        return "inf"
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def read_instance(text: str, *, check: bool = True) -> Instance:
    """Parse an instance document and (by default) validate it."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    inst = instance_from_dict(doc)
    if check:
        problems = validate(inst)
        if problems:
            raise InvalidInstance(problems)
    return inst


def write_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def schedule_to_dict(schedule: Schedule) -> dict:
    return {
        "objective": schedule.objective,
        "total_cost": format_rational(schedule.total_cost),
        "scheduling_cost": format_rational(schedule.scheduling_cost),
        "tariff_cost": format_rational(schedule.tariff_cost),
        "profile": list(schedule.profile.counts),
        "completion_times": {
            str(j): format_rational(c) for j, c in sorted(schedule.completion_times.items())
        },
        "segments": [
            {
                "job": s.job,
                "machine": s.machine,
                "start": format_rational(s.start),
                "end": format_rational(s.end),
            }
            for s in schedule.segments
        ],
    }


def schedule_from_dict(doc: Mapping) -> Schedule:
    segs = tuple(
        Segment(
            int(s["job"]),
            int(s["machine"]),
            to_fraction(s["start"], where="segment.start"),
            to_fraction(s["end"], where="segment.end"),
        )
        for s in _require(doc, "segments", "schedule")
    )
    return Schedule(
        objective=str(_require(doc, "objective", "schedule")),
        segments=segs,
        completion_times={
            int(k): to_fraction(v, where="completion_times")
            for k, v in _require(doc, "completion_times", "schedule").items()
        },
        profile=ReservationProfile(tuple(_require(doc, "profile", "schedule"))),
        scheduling_cost=to_fraction(_require(doc, "scheduling_cost", "schedule")),
        tariff_cost=to_fraction(_require(doc, "tariff_cost", "schedule")),
        total_cost=to_fraction(_require(doc, "total_cost", "schedule")),
    )


def write_schedule(schedule: Schedule) -> str:
    return json.dumps(schedule_to_dict(schedule), indent=2) + "\n"


def read_schedule(text: str) -> Schedule:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return schedule_from_dict(doc)


# --- helpers shared by the single-machine solvers ------------------------------------------


def slots_to_segments(job_id: int, slots: Sequence[int], machine: int = 0) -> list[Segment]:
    """Merge a sorted list of unit slots into maximal contiguous segments."""
    segs = []
    run_start = prev = None
    for t in slots:
        if prev is not None and t == prev + 1:
            prev = t
            continue
        if run_start is not None:
            segs.append(Segment(job_id, machine, Fraction(run_start), Fraction(prev + 1)))
        run_start = prev = t
    if run_start is not None:
        segs.append(Segment(job_id, machine, Fraction(run_start), Fraction(prev + 1)))
    return segs


def schedule_in_profile(
    order: Sequence[int],
    profile: ReservationProfile,
    instance: Instance,
    objective: str,
    weights: Mapping[int, Fraction] | None = None,
) -> Schedule:
    """Process jobs back-to-back in ``order`` inside the profile's utilized slots."""
    slots = profile.slots(instance.tariff)
    need = sum(instance.job(j).p for j in order)
    if len(slots) < need:
        raise InsufficientCapacity(f"profile holds {len(slots)} slots, jobs need {need}")
    segments: list[Segment] = []
    completion: dict[int, Fraction] = {}
    sched = Fraction(0)
    pos = 0
    for jid in order:
        job = instance.job(jid)
        mine = slots[pos : pos + job.p]
        pos += job.p
        segments.extend(slots_to_segments(jid, mine))
        completion[jid] = Fraction(mine[-1] + 1)
        w = job.w if weights is None else weights[jid]
        sched += w * completion[jid]
    used = ReservationProfile.from_slots(slots[:need], instance.tariff)
    return Schedule(objective, segments, completion, used, sched, used.cost(instance.tariff))


def canonical_profile(slots: Iterable[int], tariff: TariffFunction) -> ReservationProfile:
    """Prefix-convention profile holding the same per-interval slot counts."""
    return ReservationProfile.from_slots(slots, tariff)
