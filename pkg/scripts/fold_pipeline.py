"""Fold example end to end: the gap between monotone and general maps.

Writes instance.json, U.json, T_monotone.json, a solve result, the built
map and SVG plots into the output directory, and prints each value.
"""
import argparse
import time
from fractions import Fraction
from pathlib import Path

from osctransport import fileio
from osctransport.cli import main as cli
from osctransport.fixtures import fold_instance, fold_map
from osctransport.mapbuild import build_map, monotone_map, verify_map
from osctransport.osceval import osc_map
from osctransport.solver import solve
from osctransport.stepcalc import Direction
from osctransport.strip import enlarge


def run(out: Path, delta: Fraction, n_atoms: int, n_cells: int) -> None:
    out.mkdir(parents=True, exist_ok=True)
    inst = fold_instance(delta)
    dom = inst.domain
    print(f"delta = {delta}")
    print(f"osc(U)     = {osc_map(fold_map(), dom, delta)}")
    for d in Direction:
        print(f"osc(T_{d.value}) = {osc_map(monotone_map(inst.mu, inst.nu, d), dom, delta)}")

    t = time.perf_counter()
    res = solve(inst, n=n_atoms)
    print(f"K (atoms, n={n_atoms}) = {res.K}   [{time.perf_counter() - t:.2f}s]")
    fileio.write_json(out / "result_atoms.json", fileio.result_to_json(res))

    t = time.perf_counter()
    res = solve(inst, n=n_cells, mode="cells")
    T = build_map(inst, res)
    slack = max(c.length for c in res.y_cells)
    rep = verify_map(inst, T, res.K + slack, enlarge(res.strip, delta, res.K))
    print(f"K (cells, n={n_cells}) = {res.K}, built map: osc = {rep.osc}, "
          f"{rep.pieces} piece(s), verified = {rep.passed}   [{time.perf_counter() - t:.2f}s]")
    fileio.write_json(out / "result_cells.json", fileio.result_to_json(res))
    fileio.write_json(out / "T_built.json", fileio.map_to_json(T))

    cli(["counterexample", "--delta", str(delta), "-o", str(out)])
    for name in ("U", "T_monotone", "T_built"):
        cli(["plot", "-m", str(out / f"{name}.json"), "-o", str(out / f"{name}.svg")])
    cli(["plot", "-m", str(out / "result_cells.json"), "-o", str(out / "strip.svg")])
    print(f"files in {out}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-o", "--out", type=Path, default=Path("fold_out"))
    ap.add_argument("--delta", type=Fraction, default=Fraction(1, 10))
    ap.add_argument("--atoms", type=int, default=16)
    ap.add_argument("--cells", type=int, default=12)
    a = ap.parse_args()
    run(a.out, a.delta, a.atoms, a.cells)
