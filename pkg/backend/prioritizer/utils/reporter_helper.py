"""
Rendering of analysis and run reports as text, JSON or sectioned CSV.

Output carries no timestamps; identical reports render to identical bytes.
"""

import io
import logging
from pathlib import Path
from typing import Dict, List, Union

import pandas as pd

from backend.shared.run_utils import LOGGER_NAME

from ..complexity.complexity_models import WeightTable
from ..orchestrator import AnalysisReport, RunReport

logger = logging.getLogger(LOGGER_NAME)

Report = Union[AnalysisReport, RunReport]

FORMATS = ("text", "json", "csv")
_EXTENSIONS = {"text": "txt", "json": "json", "csv": "csv"}
_TRACE_HEADER = f"  {'X':<10} {'F(X)':>5} {'r':>6} {'C':<10} {'M':<10} " + "F'(X)".rjust(6)


def _weight_lines(table: WeightTable, indent: str = "") -> List[str]:
    lines = [
        f"{indent}Weights for {table.graph_name} (s_max = {table.s_max})",
        f"{indent}{'node':>6} {'A':>5} {'B':>4} {'A+B':>5} {'nested':>7} {'total':>6}  pushes",
    ]
    for row in table.rows:
        pin = "*" if row.pinned else " "
        pushes = "+".join(str(c) for c in row.contributions)
        lines.append(
            f"{indent}{row.node:>6} {row.stack_weight:>5} {row.if_complexity:>3}{pin} "
            f"{row.own_total:>5} {row.nested_complexity:>7} {row.total:>6}  {pushes}"
        )
    lines.append(f"{indent}{'sum':>6} {'':>5} {'':>4} {'':>5} {'':>7} {table.grand_total:>6}")
    pinned = [row for row in table.rows if row.pinned]
    for row in pinned:
        reason = f": {row.pin_reason}" if row.pin_reason else ""
        lines.append(f"{indent}  * node {row.node} B pinned (computed {row.if_computed}){reason}")
    for host, sub in table.nested.items():
        lines.append("")
        lines.append(f"{indent}Nested in node {host}:")
        lines.extend(_weight_lines(sub, indent + "  "))
    return lines


def _layout_lines(report: Report) -> List[str]:
    if not report.layout:
        return ["Layout: none (no decision nodes)"]
    return [f"Layout ({report.total_bits} bits):"] + [f"  {line}" for line in report.layout]


def render_text(report: Report) -> str:
    lines = [f"Model {report.model_name} ({report.model_kind})", ""]
    if isinstance(report, AnalysisReport):
        decisions = ", ".join(report.decision_nodes) or "-"
        lines.append(f"Nodes: {report.node_count}  Decision nodes: {decisions}")
        lines.append("")
    lines.extend(_weight_lines(report.weights))
    lines.append("")
    lines.extend(_layout_lines(report))

    if isinstance(report, RunReport):
        if report.notice:
            lines += ["", f"Notice: {report.notice}"]

        if report.scenarios:
            lines += ["", "Ranked scenarios:"]
            for s in report.scenarios:
                flags = "" if s.complete else " (incomplete)"
                flags += " (aliased)" if s.aliased else ""
                labels = f"  [{', '.join(s.labels)}]" if s.labels else ""
                lines.append(
                    f"  {s.rank:>3}. {s.fitness:>5}  {s.chromosome or '-':<10} "
                    f"{'-'.join(s.nodes)}{labels}{flags}"
                )

        if report.ga is not None:
            ga = report.ga
            lines += [
                "",
                f"GA: seed {ga.config.seed}, population {ga.config.population_size}, "
                f"pc {ga.config.crossover_prob}, pm {ga.config.mutation_prob}, "
                f"elitism {'on' if ga.config.elitism else 'off'}, "
                f"immigrants {'on' if ga.config.immigrants else 'off'}",
                "Initial population: "
                + ", ".join(f"{c}={f}" for c, f in zip(ga.initial_population, ga.initial_fitness)),
            ]
            for iteration in ga.trace:
                lines.append(f"Iteration {iteration.index}:")
                lines.append(_TRACE_HEADER)
                for row in iteration.rows:
                    note = ""
                    if row.elite:
                        note = f"  elite -> {row.survivor}"
                    elif row.immigrant:
                        note = f"  immigrant -> {row.survivor}"
                    lines.append(
                        f"  {row.x:<10} {row.fx:>5} {row.r:>6.3f} {row.c:<10} {row.m:<10} "
                        f"{row.fm:>6}{note}"
                    )
            lines.append(
                f"Best: {ga.best} fitness {ga.best_fitness} path {'-'.join(ga.best_path.nodes)} "
                f"after {ga.iterations_run} iteration(s) ({ga.stop_reason})"
            )

        if report.verification is not None:
            v = report.verification
            lines += [
                "",
                f"Verification: optimum {'found' if v.optimum_found else 'MISSED'}, "
                f"GA best {v.ga_best}, maximum {v.oracle_maximum}, gap {v.gap}, "
                f"coverage {v.covered_paths}/{v.distinct_paths} ({v.coverage:.3f})",
            ]

        if report.sweep is not None:
            sw = report.sweep
            lines += [
                "",
                f"Sweep seeds {sw.seeds[0]}..{sw.seeds[1]}: "
                f"optimum found {sw.optimum_found}/{sw.runs} "
                f"(rate {sw.rate:.3f}, required {sw.min_rate:.3f}), mean gap {sw.mean_gap:.3f}, "
                f"mean coverage {sw.mean_coverage:.3f}",
            ]

    return "\n".join(lines) + "\n"


def render_json(report: Report) -> str:
    exclude = {"oracle"} if isinstance(report, RunReport) else None
    return report.model_dump_json(indent=2, exclude=exclude) + "\n"


def _csv_section(name: str, records: List[Dict[str, object]]) -> str:
    buffer = io.StringIO()
    buffer.write(f"# {name}\n")
    pd.DataFrame.from_records(records).to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def render_csv(report: Report) -> str:
    """One CSV block per section, each introduced by a ``# <section>`` line."""
    sections = [_csv_section("weights", report.weights.as_records())]
    for host, sub in report.weights.nested.items():
        sections.append(_csv_section(f"weights nested {host}", sub.as_records()))

    if isinstance(report, RunReport):
        if report.scenarios:
            sections.append(
                _csv_section(
                    "scenarios",
                    [
                        {
                            "rank": s.rank,
                            "chromosome": s.chromosome,
                            "path": "-".join(s.nodes),
                            "fitness": s.fitness,
                            "aliased": s.aliased,
                        }
                        for s in report.scenarios
                    ],
                )
            )
        if report.ga is not None and report.ga.trace:
            sections.append(_csv_section("trace", report.ga.trace_records()))
        if report.verification is not None:
            sections.append(_csv_section("verification", [report.verification.model_dump()]))
        if report.sweep is not None:
            sections.append(
                _csv_section("sweep", [row.model_dump() for row in report.sweep.rows])
            )
        if report.oracle is not None:
            sections.append(_csv_section("enumeration", report.oracle.as_records()))

    return "\n".join(sections)


def render(report: Report, fmt: str = "text") -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return render_csv(report)
    if fmt == "text":
        return render_text(report)
    raise ValueError(f"Unsupported report format '{fmt}'; choose one of {', '.join(FORMATS)}")


def save_report(report_text: str, out_dir: Union[str, Path], stem: str, fmt: str = "text") -> Path:
    """
    Save rendered report text as ``<out_dir>/<stem>.<ext>``.

    Returns:
        Path to the saved file
    """
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{stem}.{_EXTENSIONS.get(fmt, 'txt')}"
    path.write_text(report_text, encoding="utf-8")
    logger.info(f"Report saved to {path}")
    return path
