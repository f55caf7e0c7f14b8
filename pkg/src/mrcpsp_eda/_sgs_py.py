"""Pure-Python serial schedule generation kernels.

Interface shared with the compiled ``_sgs_ext`` module:

``KernelData(instance)``
    Flattened per-instance tables.
``forward(data, order, modes) -> list[int]``
    Start times (length J+2) of the serial SGS applied to ``order`` (real
    activities) with 0-based mode indices ``modes`` (length J+2).
``backward(data, order, modes, deadline) -> list[int] | None``
    Right-justified start times, activities taken in reverse ``order``;
    ``None`` when some activity cannot finish by ``deadline``.

Both raise ``UnschedulableMode`` for a renewable request above capacity.
"""

from .errors import UnschedulableMode

BACKEND = "python"


class KernelData:
    __slots__ = ("n", "R", "dur", "req", "cap", "preds", "succs", "horizon")

    def __init__(self, instance):
        self.n = len(instance.modes)
        self.R = instance.n_renewable
        self.dur = [[m.duration for m in ms] for ms in instance.modes]
        self.req = [[tuple(m.renewable) for m in ms] for ms in instance.modes]
        self.cap = list(instance.renewable_capacity)
        self.preds = [list(p) for p in instance.predecessors]
        self.succs = [list(s) for s in instance.successors]
        self.horizon = sum(max(ds) for ds in self.dur)


def _demand(data, j, req):
    demand = []
    for k in range(data.R):
        r = req[k]
        if r:
            limit = data.cap[k] - r
            if limit < 0:
                raise UnschedulableMode(f"activity {j} requests {r} of renewable {k + 1} (capacity {data.cap[k]})")
            demand.append((k, r, limit))
    return demand


def forward(data, order, modes):
    n = data.n
    start = [0] * n
    finish = [0] * n
    H = data.horizon + 1
    usage = [[0] * H for _ in range(data.R)]
    for j in order:
        m = modes[j]
        d = data.dur[j][m]
        t = 0
        for p in data.preds[j]:
            f = finish[p]
            if f > t:
                t = f
        if d > 0:
            demand = _demand(data, j, data.req[j][m])
            if demand:
                tau = t
                while tau < t + d:
                    for k, _, limit in demand:
                        if usage[k][tau] > limit:
                            t = tau + 1
                            break
                    tau += 1
                for k, r, _ in demand:
                    u = usage[k]
                    for tau in range(t, t + d):
                        u[tau] += r
        start[j] = t
        finish[j] = t + d
    sink = n - 1
    end = 0
    for j in range(1, sink):
        if finish[j] > end:
            end = finish[j]
    start[sink] = end
    return start


def backward(data, order, modes, deadline):
    n = data.n
    sink = n - 1
    start = [0] * n
    start[sink] = deadline
    usage = [[0] * max(deadline, 1) for _ in range(data.R)]
    for j in reversed(order):
        m = modes[j]
        d = data.dur[j][m]
        lf = deadline
        for s in data.succs[j]:
            if start[s] < lf:
                lf = start[s]
        t = lf - d
        if t < 0:
            return None
        if d > 0:
            demand = _demand(data, j, data.req[j][m])
            if demand:
                tau = t + d - 1
                while tau >= t:
                    for k, _, limit in demand:
                        if usage[k][tau] > limit:
                            t = tau - d
                            break
                    if t < 0:
                        return None
                    tau -= 1
                for k, r, _ in demand:
                    u = usage[k]
                    for tau in range(t, t + d):
                        u[tau] += r
        start[j] = t
    return start
