"""Family runs for the two theorems, shared by the CLI and the self-test.

Members are processed by a bounded thread pool (the compiled kernels drop
the GIL) and rows come back sorted by member seed, whatever the completion
order.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor

from .config import ExperimentConfig, worker_count
from .families import generate_domain_family, generate_member
from .inequality import (SplitAnalysis, Theorem1Data, Theorem2Data, get_bank, optimize_N,
                         verify_theorem2)

__all__ = ["map_ordered", "theorem1_data", "theorem2_data", "theorem1_reports",
           "theorem2_reports", "reports_csv", "split_table", "CSV_COLUMNS"]

CSV_COLUMNS = ("seed", "gamma", "lhs", "bmo", "holder", "g_sup", "l1", "implied_C",
               "N_star", "A1", "A2", "A3")


def map_ordered(fn, items, workers: int | None = None) -> list:
    """``[fn(x) for x in items]`` on at most `workers` threads."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def theorem1_data(cfg: ExperimentConfig, start: int = 0, count: int | None = None) -> list:
    """:class:`Theorem1Data` for family members ``start .. start + count - 1``."""
    spec = cfg.grid()
    fs = cfg.family_spec(start, count)

    def one(i):
        m = generate_member(fs, spec, i)
        return Theorem1Data(m.g, 0, m.seed)

    return map_ordered(one, range(fs.start, fs.start + fs.count))


def theorem2_data(cfg: ExperimentConfig, start: int = 0, count: int | None = None) -> list:
    count = cfg.seeds if count is None else count
    pairs = generate_domain_family(cfg.omega_grid(), count, cfg.seed, start)
    return map_ordered(lambda p: Theorem2Data(p[1], p[0]), pairs)


def _by_seed(reports: list) -> list:
    return sorted(reports, key=lambda r: (r.seed, r.gamma))


def theorem1_reports(cfg: ExperimentConfig, gammas=None, split: bool = True,
                     data: list | None = None) -> list:
    gammas = (cfg.gamma,) if gammas is None else tuple(gammas)
    data = theorem1_data(cfg) if data is None else data
    bank = get_bank(cfg.grid(), "homogeneous") if split else None

    def one(d):
        out = []
        for g in gammas:
            an = SplitAnalysis(d.f, d.g, g, bank, with_norms=False) if split else None
            out.append(d.report(g, bank, split, cfg.N_range, an))
        return out

    return _by_seed([r for rows in map_ordered(one, data) for r in rows])


def theorem2_reports(cfg: ExperimentConfig, gammas=None, chain: bool = True,
                     data: list | None = None) -> list:
    """Theorem 2 rows on Omega_T; with `chain` the extension pipeline runs too."""
    gammas = (cfg.gamma,) if gammas is None else tuple(gammas)
    layout = cfg.layout()
    if chain:
        fs = generate_domain_family(cfg.omega_grid(), cfg.seeds, cfg.seed)

        def one(p):
            return [verify_theorem2(p[1], g, layout, seed=p[0], N_range=cfg.N_range)
                    for g in gammas]

        return _by_seed([r for rows in map_ordered(one, fs) for r in rows])
    data = theorem2_data(cfg) if data is None else data
    return _by_seed([d.report(g, layout.T) for d in data for g in gammas])


def reports_csv(reports: list) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                    for k, v in r.csv_row().items()})
    return buf.getvalue()


def split_table(d: Theorem1Data, cfg: ExperimentConfig) -> tuple:
    """``(N_star, table)`` of the split bound against N for one member."""
    bank = get_bank(cfg.grid(), "homogeneous")
    an = SplitAnalysis(d.f, d.g, cfg.gamma, bank, with_norms=True)
    n_star, _, table = optimize_N(d.f, d.g, bank, cfg.gamma, cfg.N_range, an)
    return n_star, table

