"""Acceptance verification: the fixed 10-seed panel and its criteria.

Every distributional claim is evaluated over seeds 1..10 of the reference
configuration, requiring the stated seed majority; accounting, determinism,
performance, and statistics-calibration checks ride along. Used by both
the ``verify`` CLI command and the acceptance test suite.
"""

from __future__ import annotations

import filecmp
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import stats
from .core import Parameters
from .engine import AccountingAuditError, RunResult, run
from .output import emit_all

PANEL_SEEDS = tuple(range(1, 11))
PANEL_TIME_BUDGET_S = 60.0
SINGLE_RUN_BUDGET_S = 5.0


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} criterion {self.number}: {self.name} - {self.detail}"


@dataclass
class Panel:
    """The ten reference runs plus bookkeeping for the checks."""

    results: list[RunResult | None]  # None where the audit aborted the run
    audit_errors: list[str]
    elapsed_s: float
    parameters: Parameters


def run_panel(base: Parameters | None = None) -> Panel:
    """Run the reference experiment once per panel seed."""
    base = base if base is not None else Parameters()
    results: list[RunResult | None] = []
    audit_errors: list[str] = []
    start = time.perf_counter()
    for seed in PANEL_SEEDS:
        params = base.with_overrides(seed=seed)
        try:
            results.append(run(params))
        except AccountingAuditError as exc:  # pragma: no cover - audit never trips
            results.append(None)
            audit_errors.append(f"seed {seed}: {exc}")
    elapsed = time.perf_counter() - start
    return Panel(results, audit_errors, elapsed, base)


def _count(flags: list[bool]) -> int:
    return sum(bool(f) for f in flags)


def _bankruptcy_series(result: RunResult) -> dict[str, stats.Sample]:
    return {
        "d": stats.Sample(np.array([r.bankrupt_d for r in result.records], float)),
        "u": stats.Sample(np.array([r.bankrupt_u for r in result.records], float)),
        "b": stats.Sample(np.array([r.bankrupt_b for r in result.records], float)),
    }


def _criterion_sizes(panel: Panel) -> CriterionResult:
    per_sector = {"d": [], "u": [], "b": []}
    for result in panel.results:
        if result is None:
            for flags in per_sector.values():
                flags.append(False)
            continue
        sections = {
            "d": result.final_networth_d,
            "u": result.final_networth_u,
            "b": result.final_equity_b,
        }
        for key, values in sections.items():
            sample = stats.Sample(values)
            try:
                _, _, skew, _ = stats.moments(sample)
                report = stats.bera_jarque(sample)
                per_sector[key].append(report.reject_at_1pct and skew > 0)
            except ValueError:
                per_sector[key].append(False)
    d, u, b = _count(per_sector["d"]), _count(per_sector["u"]), _count(per_sector["b"])
    in_budget = panel.elapsed_s < PANEL_TIME_BUDGET_S
    passed = d >= 8 and u >= 7 and b >= 7 and in_budget
    detail = (
        f"non-normal right-skewed sizes: downstream {d}/10 (need 8), "
        f"upstream {u}/10 (need 7), banks {b}/10 (need 7); "
        f"panel ran in {panel.elapsed_s:.1f}s (budget {PANEL_TIME_BUDGET_S:.0f}s)"
    )
    return CriterionResult(1, "size distributions", passed, detail)


def _criterion_growth(panel: Panel) -> CriterionResult:
    flags = []
    for result in panel.results:
        ok = False
        if result is not None:
            sample = stats.growth_rate_sample(result)
            if sample.n >= 8 and np.ptp(sample.values) > 0:
                fit = stats.compare_fits(sample)
                _, _, _, kurt = stats.moments(sample)
                ok = fit.laplace_preferred and kurt > 0.5
        flags.append(ok)
    got = _count(flags)
    return CriterionResult(
        2,
        "Laplace growth rates",
        got >= 8,
        f"Laplace-preferred with excess kurtosis > 0.5 in {got}/10 seeds (need 8)",
    )


def _criterion_correlation(panel: Panel) -> CriterionResult:
    all_positive = []
    du_strong = []
    for result in panel.results:
        if result is None:
            all_positive.append(False)
            du_strong.append(False)
            continue
        series = _bankruptcy_series(result)
        lag0 = {}
        for pair in (("d", "u"), ("d", "b"), ("u", "b")):
            corr = stats.cross_correlation(series[pair[0]], series[pair[1]], 0)
            lag0[pair] = corr[0]
        values = list(lag0.values())
        all_positive.append(all(math.isfinite(v) and v > 0 for v in values))
        du = lag0[("d", "u")]
        du_strong.append(math.isfinite(du) and du > 0.1)
    got_all, got_du = _count(all_positive), _count(du_strong)
    passed = got_all >= 8 and got_du >= 7
    return CriterionResult(
        3,
        "cross-sector bankruptcy correlation",
        passed,
        f"lag-0 positive for all pairs in {got_all}/10 (need 8); "
        f"downstream-upstream > 0.1 in {got_du}/10 (need 7)",
    )


def _criterion_avalanches(panel: Panel) -> CriterionResult:
    flags = []
    for result in panel.results:
        ok = False
        if result is not None:
            sample = stats.avalanche_series(result.records)
            if np.ptp(sample.values) > 0:
                report = stats.bera_jarque(sample)
                _, _, _, kurt = stats.moments(sample)
                ok = report.reject_at_1pct and kurt > 0
        flags.append(ok)
    got = _count(flags)
    return CriterionResult(
        4,
        "fat-tailed avalanches",
        got >= 8,
        f"normality rejected with positive excess kurtosis in {got}/10 seeds (need 8)",
    )


def _criterion_fluctuations(panel: Panel) -> CriterionResult:
    flags = []
    for result in panel.results:
        ok = False
        if result is not None:
            series = np.array(
                [r.avg_output_d for r in result.records if r.t >= 101], dtype=float
            )
            if series.size >= 2 and np.mean(series) > 0:
                cv = float(np.std(series) / np.mean(series))
                diffs = np.diff(series)
                monotone = bool(np.all(diffs >= 0) or np.all(diffs <= 0))
                ok = cv > 0.01 and not monotone
        flags.append(ok)
    got = _count(flags)
    return CriterionResult(
        5,
        "fluctuations without aggregate shocks",
        got == 10,
        f"production CV > 0.01 and non-monotone over t in [101,1000] in {got}/10 seeds (need 10)",
    )


def _criterion_contagion(panel: Panel) -> CriterionResult:
    flags = []
    for result in panel.results:
        ok = False
        if result is not None:
            ok = any(
                r.bankrupt_d > 0 and r.bankrupt_u > 0 and r.bankrupt_b > 0
                for r in result.records
            )
        flags.append(ok)
    got = _count(flags)
    return CriterionResult(
        6,
        "contagion channel live",
        got >= 6,
        f"simultaneous failures in all three sectors in {got}/10 seeds (need 6)",
    )


def _criterion_audit(panel: Panel) -> CriterionResult:
    clean = sum(1 for r in panel.results if r is not None)
    passed = clean == len(PANEL_SEEDS) and not panel.audit_errors
    detail = f"accounting identities held every period in {clean}/10 seeds (need 10)"
    if panel.audit_errors:
        detail += "; " + "; ".join(panel.audit_errors)
    return CriterionResult(7, "accounting audit", passed, detail)


def _criterion_determinism(panel: Panel, workdir: Path) -> CriterionResult:
    params = panel.parameters.with_overrides(seed=PANEL_SEEDS[0])
    start = time.perf_counter()
    first = run(params)
    run_time = time.perf_counter() - start
    second = run(params)
    digests_equal = first.digest() == second.digest()

    dir_a = workdir / "determinism_a"
    dir_b = workdir / "determinism_b"
    emit_all(first, dir_a)
    emit_all(second, dir_b)
    mismatched = _compare_trees(dir_a, dir_b, ignore={"manifest.json"})
    byte_identical = not mismatched
    in_budget = run_time < SINGLE_RUN_BUDGET_S
    passed = digests_equal and byte_identical and in_budget
    detail = (
        f"digests {'match' if digests_equal else 'differ'}; "
        f"outputs {'byte-identical' if byte_identical else 'differ: ' + ', '.join(mismatched)}; "
        f"full run took {run_time:.2f}s (budget {SINGLE_RUN_BUDGET_S:.0f}s)"
    )
    return CriterionResult(8, "determinism and performance", passed, detail)


def _compare_trees(a: Path, b: Path, ignore: set[str]) -> list[str]:
    names = sorted(
        set(p.name for p in a.iterdir()) | set(p.name for p in b.iterdir())
    )
    mismatched = []
    for name in names:
        if name in ignore:
            continue
        fa, fb = a / name, b / name
        if not (fa.exists() and fb.exists()) or not filecmp.cmp(fa, fb, shallow=False):
            mismatched.append(name)
    return mismatched


def jb_false_rejection_rate(
    replications: int = 1000, sample_size: int = 500, seed: int = 12345
) -> float:
    """1%-level rejection frequency of the normality test on true normals."""
    rng = np.random.default_rng(seed)
    rejections = 0
    for _ in range(replications):
        sample = stats.Sample(rng.standard_normal(sample_size))
        if stats.bera_jarque(sample).reject_at_1pct:
            rejections += 1
    return rejections / replications


def fit_preference_accuracy(
    trials_per_family: int = 50, sample_size: int = 100_000, seed: int = 54321
) -> tuple[int, int]:
    """(correct, total) preference calls on synthetic Laplace and Gaussian
    samples."""
    rng = np.random.default_rng(seed)
    correct = 0
    total = 0
    for _ in range(trials_per_family):
        laplace = stats.Sample(rng.laplace(0.0, 1.0, sample_size))
        if stats.compare_fits(laplace).laplace_preferred:
            correct += 1
        total += 1
        gaussian = stats.Sample(rng.standard_normal(sample_size))
        if not stats.compare_fits(gaussian).laplace_preferred:
            correct += 1
        total += 1
    return correct, total


def _criterion_calibration() -> CriterionResult:
    rate = jb_false_rejection_rate()
    correct, total = fit_preference_accuracy()
    rate_ok = 0.003 <= rate <= 0.03
    fits_ok = correct == total
    passed = rate_ok and fits_ok
    detail = (
        f"normality-test 1% false-rejection rate {rate:.3%} (need within [0.3%, 3%]); "
        f"fit preference correct in {correct}/{total} synthetic trials (need all)"
    )
    return CriterionResult(9, "statistics calibration", passed, detail)


def evaluate(panel: Panel, workdir: str | Path) -> list[CriterionResult]:
    """Evaluate every acceptance criterion against a finished panel."""
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    return [
        _criterion_sizes(panel),
        _criterion_growth(panel),
        _criterion_correlation(panel),
        _criterion_avalanches(panel),
        _criterion_fluctuations(panel),
        _criterion_contagion(panel),
        _criterion_audit(panel),
        _criterion_determinism(panel, workdir),
        _criterion_calibration(),
    ]


def run_verification(workdir: str | Path) -> list[CriterionResult]:
    """Run the full panel and evaluate all criteria."""
    panel = run_panel()
    return evaluate(panel, workdir)
