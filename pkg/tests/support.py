"""Fixtures and independent oracles shared by the tests."""

import itertools
import random

from tousched import Assignment, Instance, Objectives, Schedule

THREE_JOBS = Instance((3, 2, 1), (1.0,), (1, 5, 2, 3, 9, 4, 8, 13, 7, 6))
SIX_PAIRS = Instance((2,) * 6, (1.0, 2.0), (10, 1, 1, 10, 1, 1, 10))
# exchange fixture: jobs A (p=3), B, C (p=1) on one machine, K=9
EXCHANGE = Instance((3, 1, 1), (1.0,), (7, 1, 1, 10, 6, 4, 5, 4, 6))
EXCHANGE_START = {0: (0, 2), 1: (0, 6), 2: (0, 8)}


def exchange_start():
    return Schedule.from_starts(EXCHANGE, EXCHANGE_START)


def brute_objectives(instance):
    """Every feasible (makespan, tec) by plain product enumeration. Tiny instances only."""
    p, u, c = instance.processing_times, instance.consumption_rates, instance.slot_costs
    k = instance.n_slots
    choices = [[(h, t) for h in range(instance.n_machines) for t in range(1, k - pj + 2)] for pj in p]
    out = []
    for combo in itertools.product(*choices):
        cells = set()
        ok = True
        for j, (h, t) in enumerate(combo):
            for s in range(t, t + p[j]):
                if (h, s) in cells:
                    ok = False
                    break
                cells.add((h, s))
            if not ok:
                break
        if ok:
            span = max(t + p[j] - 1 for j, (_, t) in enumerate(combo))
            tec = sum(u[h] * sum(c[s - 1] for s in range(t, t + p[j])) for j, (h, t) in enumerate(combo))
            out.append(Objectives(span, tec))
    return out


def brute_front(instance):
    pts = brute_objectives(instance)
    front = []
    for a in sorted(set(pts)):
        if not any(b[0] <= a[0] and b[1] <= a[1] and b != a for b in pts):
            if not front or front[-1][1] > a[1]:
                front.append(a)
    return front


def random_instance(rng, n_max=5, m_max=2, k_max=8, p_max=3, u_max=3, c_max=8, integer_costs=True):
    k = rng.randint(2, k_max)
    n = rng.randint(1, n_max)
    m = rng.randint(1, m_max)
    p = tuple(rng.randint(1, min(p_max, k)) for _ in range(n))
    u = tuple(float(rng.randint(0 if rng.random() < 0.1 else 1, u_max)) for _ in range(m))
    if integer_costs:
        c = tuple(float(rng.randint(0, c_max)) for _ in range(k))
    else:
        c = tuple(round(rng.uniform(0, c_max), 3) for _ in range(k))
    return Instance(p, u, c)


def acceptance_instances(count=50, seed=2024):
    rng = random.Random(seed)
    return [random_instance(rng) for _ in range(count)]


def random_split_schedule(rng, m_max=3, k_max=12):
    """A random split-schedule together with its instance.

    Occupied slots form runs on each machine; every job takes slots from a
    single run, so each gap inside a job is covered by other jobs.
    """
    m = rng.randint(1, m_max)
    k = rng.randint(2, k_max)
    cells = []
    for h in range(m):
        occupied = sorted(rng.sample(range(1, k + 1), rng.randint(0, k)))
        runs = []
        for t in occupied:
            if runs and runs[-1][-1] == t - 1:
                runs[-1].append(t)
            else:
                runs.append([t])
        for run in runs:
            labels = max(1, min(len(run), rng.randint(1, 3)))
            owner = [rng.randrange(labels) for _ in run]
            for lab in set(owner):
                cells.append((h, tuple(t for t, o in zip(run, owner) if o == lab)))
    if not cells:
        cells = [(0, (1,))]
    rng.shuffle(cells)
    p = tuple(len(s) for _, s in cells)
    u = tuple(float(rng.randint(1, 4)) for _ in range(m))
    c = tuple(float(rng.randint(0, 9)) for _ in range(k))
    inst = Instance(p, u, c)
    return inst, Schedule(tuple(Assignment(j, h, s) for j, (h, s) in enumerate(cells)))


def random_strict_split(rng, **kw):
    """Like :func:`random_split_schedule` but with at least one non-contiguous job."""
    from tousched import ScheduleTag, classify
    while True:
        inst, sched = random_split_schedule(rng, **kw)
        if classify(inst, sched).tag is ScheduleTag.SPLIT:
            return inst, sched


# PASS/FAIL lines from the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []
