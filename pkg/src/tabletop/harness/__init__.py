"""Scenario generation, file formats, validation, benchmarking and rendering."""
from .bench import (
    BenchmarkRecord,
    PlannerSpec,
    aggregate,
    env_workers,
    format_table,
    hbfs_spec,
    pmmr_spec,
    read_results,
    run_benchmark,
    run_cell,
    write_results,
)
from .io import load_plan, load_scenario, save_plan, save_scenario, scenario_from_dict, scenario_to_dict
from .render import IoFailure, render_svg, svg_text
from .scenarios import GenConfig, GenerationTimeout, generate_scenario, generate_suite, invert
from .validate import ValidationReport, validate_plan

__all__ = [
    "BenchmarkRecord", "GenConfig", "GenerationTimeout", "IoFailure", "PlannerSpec", "ValidationReport",
    "aggregate", "env_workers", "format_table", "generate_scenario", "generate_suite", "hbfs_spec", "invert",
    "load_plan", "load_scenario", "pmmr_spec", "read_results", "render_svg", "run_benchmark", "run_cell",
    "save_plan", "save_scenario", "scenario_from_dict", "scenario_to_dict", "svg_text", "validate_plan",
    "write_results",
]
