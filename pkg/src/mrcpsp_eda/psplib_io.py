"""Reading and writing PSPLIB multi-mode (``.mm``) files and best-known-value tables.

PSPLIB numbers jobs ``1..J+2``; instances use ``0..J+1``.
"""

from __future__ import annotations

import io
import re
from pathlib import Path

from .errors import (
    BadModeRow,
    DanglingSuccessor,
    DuplicateKey,
    InconsistentJobCount,
    MalformedHeader,
    NonIntegerMakespan,
)
from .model import Mode, ProjectInstance

_SECTIONS = ("PRECEDENCE RELATIONS", "REQUESTS/DURATIONS", "RESOURCEAVAILABILITIES")
_INT = re.compile(r"-?\d+")


def _ints(line: str) -> list[int]:
    return [int(x) for x in _INT.findall(line)]


def _header_value(lines, key, *, required=True):
    for no, line in lines:
        if line.strip().lower().startswith(key):
            if ":" not in line:
                raise MalformedHeader(f"no value for '{key}'", no)
            vals = _ints(line.split(":", 1)[1])
            if not vals:
                raise MalformedHeader(f"no value for '{key}'", no)
            return vals[0]
    if required:
        raise MalformedHeader(f"missing header field '{key}'")
    return None


def parse_instance(text, name: str = "") -> ProjectInstance:
    """Parse the contents of a PSPLIB ``.mm`` file.

    ``text`` may be a string or a readable text stream.
    """
    if not isinstance(text, str):
        text = text.read()
    lines = list(enumerate(text.splitlines(), start=1))

    # section banners must all appear, in order
    starts = {}
    last = 0
    for banner in _SECTIONS:
        hit = next(
            (i for i, (_, line) in enumerate(lines) if line.strip().upper().startswith(banner + ":")), None
        )
        if hit is None:
            raise MalformedHeader(f"missing section '{banner}:'")
        if hit < last:
            raise MalformedHeader(f"section '{banner}:' out of order", lines[hit][0])
        starts[banner] = hit
        last = hit

    head = lines[: starts[_SECTIONS[0]]]
    n_jobs = _header_value(head, "jobs (incl. supersource/sink")
    horizon = _header_value(head, "horizon", required=False)
    R = _resource_count(head, "- renewable")
    N = _resource_count(head, "- nonrenewable")
    D = _resource_count(head, "- doubly constrained", required=False) or 0
    if D:
        raise MalformedHeader("doubly constrained resources are not supported")
    if n_jobs < 2:
        raise InconsistentJobCount(f"declared {n_jobs} jobs; at least the two dummies are required")

    prec_rows = _section_rows(lines, starts, _SECTIONS[0], _SECTIONS[1])
    req_rows = _section_rows(lines, starts, _SECTIONS[1], _SECTIONS[2])
    avail_rows = _section_rows(lines, starts, _SECTIONS[2], None)

    # PRECEDENCE RELATIONS: jobnr #modes #successors successors...
    declared_modes = {}
    pairs = set()
    for no, vals in prec_rows:
        if len(vals) < 3:
            raise MalformedHeader("precedence row needs job, #modes, #successors", no)
        job, n_modes, n_succ = vals[:3]
        succs = vals[3:]
        if len(succs) != n_succ:
            raise InconsistentJobCount(f"job {job} declares {n_succ} successors, lists {len(succs)}", no)
        if job in declared_modes:
            raise InconsistentJobCount(f"job {job} listed twice", no)
        if not 1 <= job <= n_jobs:
            raise InconsistentJobCount(f"job {job} outside 1..{n_jobs}", no)
        declared_modes[job] = n_modes
        for s in succs:
            if not 0 < s <= n_jobs:
                raise DanglingSuccessor(f"job {job} has successor {s} outside 1..{n_jobs}", no)
            pairs.add((job - 1, s - 1))
    if len(declared_modes) != n_jobs:
        raise InconsistentJobCount(f"declared {n_jobs} jobs, precedence section lists {len(declared_modes)}")

    # REQUESTS/DURATIONS: first row of a job has the job number, continuation rows do not
    width = 2 + R + N
    modes: dict[int, list[Mode]] = {}
    current = None
    for no, vals in req_rows:
        if len(vals) == width + 1:
            current = vals[0]
            if current in modes:
                raise InconsistentJobCount(f"job {current} has two request blocks", no)
            if not 1 <= current <= n_jobs:
                raise InconsistentJobCount(f"job {current} outside 1..{n_jobs}", no)
            modes[current] = []
            vals = vals[1:]
        elif len(vals) == width:
            if current is None or len(modes[current]) >= declared_modes.get(current, 0):
                raise BadModeRow(f"expected {width + 1} columns for a job row, got {width}", no)
        else:
            raise BadModeRow(f"expected {width} or {width + 1} columns, got {len(vals)}", no)
        mode_id, dur = vals[0], vals[1]
        if mode_id != len(modes[current]) + 1:
            raise BadModeRow(f"job {current}: mode {mode_id} out of sequence", no)
        modes[current].append(Mode(dur, tuple(vals[2 : 2 + R]), tuple(vals[2 + R :])))
    if len(modes) != n_jobs:
        raise InconsistentJobCount(f"declared {n_jobs} jobs, request section lists {len(modes)}")
    for job, ms in modes.items():
        if len(ms) != declared_modes[job]:
            raise BadModeRow(f"job {job}: {declared_modes[job]} modes declared, {len(ms)} listed")
    for job in (1, n_jobs):
        ms = modes[job]
        if len(ms) != 1 or ms[0].duration != 0 or any(ms[0].renewable) or any(ms[0].nonrenewable):
            raise BadModeRow(f"dummy job {job} must have one zero-duration, zero-request mode")

    if not avail_rows:
        raise MalformedHeader("no resource availabilities")
    caps = avail_rows[0][1]
    if len(caps) != R + N:
        raise MalformedHeader(f"expected {R + N} availabilities, got {len(caps)}", avail_rows[0][0])

    return ProjectInstance(
        modes=tuple(tuple(modes[j]) for j in range(1, n_jobs + 1)),
        precedences=frozenset(pairs),
        renewable_capacity=tuple(caps[:R]),
        nonrenewable_capacity=tuple(caps[R:]),
        horizon=horizon,
        name=name,
    )


def _resource_count(lines, key, required=True):
    for no, line in lines:
        if line.strip().lower().startswith(key):
            vals = _ints(line.split(":", 1)[1]) if ":" in line else []
            if not vals:
                raise MalformedHeader(f"no value for '{key}'", no)
            return vals[0]
    if required:
        raise MalformedHeader(f"missing header field '{key}'")
    return None


def _section_rows(lines, starts, banner, next_banner):
    """Numeric rows between a banner and the next; column-title and rule lines are skipped."""
    lo = starts[banner] + 1
    hi = starts[next_banner] if next_banner else len(lines)
    rows = []
    for no, line in lines[lo:hi]:
        s = line.strip()
        if not s or s.startswith("*") or s.startswith("-"):
            continue
        if not s[0].isdigit():
            continue
        rows.append((no, _ints(s)))
    return rows


def read_instance(path) -> ProjectInstance:
    path = Path(path)
    return parse_instance(path.read_text(), name=path.stem)


def write_instance(instance: ProjectInstance) -> str:
    """Render an instance in PSPLIB ``.mm`` layout."""
    n = len(instance.modes)
    R, N = instance.n_renewable, instance.n_nonrenewable
    horizon = instance.horizon if instance.horizon is not None else sum(
        max(m.duration for m in ms) for ms in instance.modes
    )
    rule = "*" * 72
    out = io.StringIO()
    w = out.write
    w(f"{rule}\n")
    w("file with basedata            : generated\n")
    w("initial value random generator: 0\n")
    w(f"{rule}\n")
    w("projects                      :  1\n")
    w(f"jobs (incl. supersource/sink ):  {n}\n")
    w(f"horizon                       :  {horizon}\n")
    w("RESOURCES\n")
    w(f"  - renewable                 :  {R}   R\n")
    w(f"  - nonrenewable              :  {N}   N\n")
    w("  - doubly constrained        :  0   D\n")
    w(f"{rule}\n")
    w("PROJECT INFORMATION:\n")
    w("pronr.  #jobs rel.date duedate tardcost  MPM-Time\n")
    w(f"    1  {n - 2:5d}      0  {horizon:6d}        0  {horizon:6d}\n")
    w(f"{rule}\n")
    w("PRECEDENCE RELATIONS:\n")
    w("jobnr.    #modes  #successors   successors\n")
    for j in range(n):
        succ = instance.successors[j]
        tail = "".join(f"{s + 1:4d}" for s in succ)
        w(f"{j + 1:4d}{len(instance.modes[j]):9d}{len(succ):11d}       {tail}".rstrip() + "\n")
    w(f"{rule}\n")
    w("REQUESTS/DURATIONS:\n")
    titles = "".join(f"  R{k + 1:2d}" for k in range(R)) + "".join(f"  N{l + 1:2d}" for l in range(N))
    w(f"jobnr. mode duration{titles}\n")
    w("-" * 72 + "\n")
    for j, ms in enumerate(instance.modes):
        for m, mode in enumerate(ms, start=1):
            job = f"{j + 1:3d}" if m == 1 else "   "
            reqs = "".join(f"{r:5d}" for r in mode.renewable + mode.nonrenewable)
            w(f"{job}{m:7d}{mode.duration:6d}  {reqs}\n")
    w(f"{rule}\n")
    w("RESOURCEAVAILABILITIES:\n")
    w(titles + "\n")
    w("".join(f"{c:5d}" for c in instance.renewable_capacity + instance.nonrenewable_capacity) + "\n")
    w(f"{rule}\n")
    return out.getvalue()


def parse_bounds_table(text) -> dict[tuple[int, int], int]:
    """Parse a PSPLIB best-known/optimum table into ``{(parameter, instance): makespan}``.

    Lines not starting with a digit are headers or comments. Only the first
    three columns are read.
    """
    if not isinstance(text, str):
        text = text.read()
    table: dict[tuple[int, int], int] = {}
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or not s[0].isdigit():
            continue
        cols = s.split()
        if len(cols) < 3:
            raise NonIntegerMakespan(f"line {no}: expected parameter, instance and makespan")
        try:
            key = (int(cols[0]), int(cols[1]))
            value = int(cols[2])
        except ValueError:
            raise NonIntegerMakespan(f"line {no}: non-integer entry in {cols[:3]}") from None
        if value <= 0:
            raise NonIntegerMakespan(f"line {no}: makespan must be positive, got {value}")
        if key in table:
            raise DuplicateKey(f"line {no}: duplicate key {key}")
        table[key] = value
    return table


def read_bounds_table(path) -> dict[tuple[int, int], int]:
    return parse_bounds_table(Path(path).read_text())


_SET_PREFIXES = tuple(
    sorted(
        ["j10", "j12", "j14", "j16", "j18", "j20", "j30", "c15", "c21"]
        + [f"m{i}" for i in range(1, 6)]
        + [f"n{i}" for i in range(0, 4)]
        + [f"r{i}" for i in range(1, 6)],
        key=len,
        reverse=True,
    )
)


def instance_key(stem: str) -> tuple[int, int] | None:
    """(parameter, instance) from a PSPLIB file stem such as ``j1012_3`` -> (12, 3)."""
    stem = stem.lower()
    for prefix in _SET_PREFIXES:
        if stem.startswith(prefix):
            rest = stem[len(prefix) :]
            break
    else:
        rest = stem.lstrip("abcdefghijklmnopqrstuvwxyz-")
    m = re.fullmatch(r"(\d+)_(\d+)", rest)
    return (int(m.group(1)), int(m.group(2))) if m else None
