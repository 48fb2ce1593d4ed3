"""Independent structural checks on emitted schedules.

Nothing here trusts the solver: every property is recomputed from the segments,
the reservation profile and the instance.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .instance import Instance, Schedule, is_inf
from .tariff import split_point_candidates


@dataclass
class AuditReport:
    problems: list[str] = field(default_factory=list)
    regions: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def add(self, msg: str) -> None:
        self.problems.append(msg)


def _utilized(schedule: Schedule, instance: Instance) -> set[int]:
    return set(schedule.profile.slots(instance.tariff))


def _common_checks(schedule: Schedule, instance: Instance, report: AuditReport) -> None:
    report.problems.extend(schedule.profile.violations(instance.tariff))
    slots = _utilized(schedule, instance)
    for seg in schedule.segments:
        if seg.end <= seg.start:
            report.add(f"segment {seg} is empty or reversed")
            continue
        t = int(seg.start // 1)
        while t < seg.end:
            if t not in slots:
                report.add(f"job {seg.job} runs in slot {t}, which is not utilized")
            t += 1
    by_machine = defaultdict(list)
    by_job = defaultdict(list)
    for seg in schedule.segments:
        by_machine[seg.machine].append(seg)
        by_job[seg.job].append(seg)
    for key, segs in list(by_machine.items()) + list(by_job.items()):
        segs = sorted(segs, key=lambda s: s.start)
        for a, b in zip(segs, segs[1:]):
            if b.start < a.end:
                report.add(f"overlap between {a} and {b}")
    claimed = schedule.tariff_cost
    actual = schedule.profile.cost(instance.tariff)
    if claimed != actual:
        report.add(f"tariff cost {claimed} but the profile costs {actual}")
    for jid, segs in by_job.items():
        end = max(s.end for s in segs)
        if schedule.completion_times.get(jid) != end:
            report.add(f"job {jid}: completion {schedule.completion_times.get(jid)} but last segment ends {end}")


def realized_split_points(schedule: Schedule, instance: Instance) -> list[int]:
    """Candidate points ``q`` where every job started before ``q`` is done by ``q``."""
    starts = {}
    for seg in schedule.segments:
        starts[seg.job] = min(starts.get(seg.job, seg.end), seg.start)
    comp = schedule.completion_times
    out = []
    for q in split_point_candidates(instance.tariff):
        if all(comp[j] <= q for j, s in starts.items() if s < q):
            out.append(q)
    return out


def audit_minsum(schedule: Schedule, instance: Instance) -> AuditReport:
    """Integer preemption, gap-free use of utilized slots, at most one partial interval per region."""
    report = AuditReport()
    tariff = instance.tariff
    _common_checks(schedule, instance, report)
    work = defaultdict(Fraction)
    for seg in schedule.segments:
        work[seg.job] += seg.end - seg.start
        if seg.start.denominator != 1 or seg.end.denominator != 1:
            report.add(f"job {seg.job} preempted at a fractional time in {seg}")
        if seg.machine != 0:
            report.add(f"segment {seg} on machine {seg.machine} of a single-machine instance")
    for job in instance.jobs:
        if work[job.id] != job.p:
            report.add(f"job {job.id}: processed {work[job.id]} of {job.p}")
    last = max(schedule.completion_times.values(), default=Fraction(0))
    covered = set()
    for seg in schedule.segments:
        covered.update(range(int(seg.start), int(seg.end)))
    for t in sorted(_utilized(schedule, instance)):
        if t < last and t not in covered:
            report.add(f"utilized slot {t} left idle while work remains")
        if t >= last:
            report.add(f"utilized slot {t} lies after the last completion {last}")
    points = realized_split_points(schedule, instance)
    report.regions = list(zip(points, points[1:]))
    partial = [
        k
        for k, (iv, c) in enumerate(zip(tariff.intervals, schedule.profile.counts))
        if 0 < c < iv.length
    ]
    for a, b in report.regions:
        inside = [k for k in partial if tariff.intervals[k].start < b and a < tariff.intervals[k].end]
        if len(inside) > 1:
            report.add(f"region [{a}, {b}) has {len(inside)} partially utilized intervals {inside}")
    return report


def audit_makespan(schedule: Schedule, instance: Instance) -> AuditReport:
    """Each job fully processed (as fractions of its machine-specific times), no
    overlaps, everything inside utilized slots and within the claimed makespan."""
    report = AuditReport()
    _common_checks(schedule, instance, report)
    done = defaultdict(Fraction)
    for seg in schedule.segments:
        p = instance.job(seg.job).processing_on(seg.machine)
        if is_inf(p):
            report.add(f"job {seg.job} runs on machine {seg.machine} where it cannot be processed")
            continue
        done[seg.job] += (seg.end - seg.start) / p
    for job in instance.jobs:
        if done[job.id] != 1:
            report.add(f"job {job.id}: processed fraction {done[job.id]}")
    cmax = max((s.end for s in schedule.segments), default=Fraction(0))
    if cmax > schedule.scheduling_cost:
        report.add(f"segments end at {cmax}, beyond claimed makespan {schedule.scheduling_cost}")
    if schedule.total_cost != schedule.scheduling_cost + schedule.tariff_cost:
        report.add("total cost is not makespan plus tariff cost")
    return report
