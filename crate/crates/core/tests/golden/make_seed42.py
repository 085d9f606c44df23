"""Writes seed42.trace from the task set in tests/simulation.rs, written
without reference to the Rust generator."""

M = (1 << 64) - 1


def splitmix(seed):
    state = seed
    while True:
        state = (state + 0x9E3779B97F4A7C15) & M
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M
        yield z ^ (z >> 31)


TASKS = [
    (0, ("periodic", 50, 5), [(2, 24), (6, 40)], [(3, 8), (4, 100)]),
    (1, ("sporadic", 30, 150), [(1, 16)], [(2, 12)]),
    (2, ("sporadic", 20, 600), [(1, 8), (3, 8), (5, 8)], []),
]
DURATION = 400
RANK = {"cs": 0, "exc": 1, "irq": 2, "ckpt": 3, "input": 4}

rng = splitmix(42)
events = []
for task, act, pps, inputs in TASKS:
    if act[0] == "periodic":
        _, period, offset = act
        starts = list(range(offset, DURATION, period))
    else:
        _, gap, permille = act
        starts, last = [], None
        for t in range(DURATION):
            if last is not None and t < last + gap:
                continue
            if next(rng) % 1000 < permille:
                starts.append(t)
                last = t
    end = max([o for o, _ in pps] + [o for o, _ in inputs]) + 1
    for job, s in enumerate(starts):
        events.append((s, "cs", task, job, None, 8))
        for k, (o, b) in enumerate(pps):
            events.append((s + o, "ckpt", task, job, k, b))
        for o, b in inputs:
            events.append((s + o, "input", task, job, None, b))
        events.append((s + end, "cs", task, job, None, 8))

events = [e for e in events if e[0] < DURATION]
events.sort(key=lambda e: (e[0], e[2], RANK[e[1]], e[3], -1 if e[4] is None else e[4]))
with open("seed42.trace", "w") as f:
    for at, kind, task, job, pp, size in events:
        pp_field = "" if pp is None else f" pp={pp}"
        f.write(f"t={at} kind={kind} task={task} job={job}{pp_field} size={size}\n")
