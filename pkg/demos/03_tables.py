"""Median iteration counts and errors over ten noise seeds for all three variants.

Writes CSV and Markdown tables to ./demo_out. Takes a few seconds per variant.
"""

from pathlib import Path

from hilbert_iter.bench import ExperimentConfig, cmd_tables

out = Path("demo_out")
for variant in ("i", "ii", "iii"):
    cmd_tables(ExperimentConfig(variant=variant), out)
    print((out / f"tables_{variant}.md").read_text())
