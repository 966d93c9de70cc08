"""
Scenario files and JSON reports
===============================

Scenarios, protocols and analyses can be written in a small text format,
parsed, re-serialized and executed. The same runs are available from the
command line as ``lrauth run <file> --json``.
"""

from pathlib import Path

from lrauth.cli import run_cli
from lrauth.scenario import parse_scenario, serialize_scenario

here = Path(__file__).resolve().parent / "scenarios"

text = (here / "bell_product_triple.lra").read_text()
sf = parse_scenario(text)
print("parsed", len(sf.states), "states and", len(sf.protocols), "protocols")
assert parse_scenario(serialize_scenario(sf)) == sf

print("\n--- lrauth run bell_product_triple.lra")
code = run_cli(["run", str(here / "bell_product_triple.lra")])
print("exit status", code)

print("\n--- lrauth nullspace bell_product_triple.lra --question 1 --party 0 --json")
run_cli(["nullspace", str(here / "bell_product_triple.lra"), "--question", "1", "--party", "0", "--json"])

# parse errors carry line numbers
try:
    parse_scenario("parties 2\nstate up = basis:0\nstate tilted = amps [0.6,0; 0.8,0]\n")
except Exception as e:
    print("\nrejected:", e)
