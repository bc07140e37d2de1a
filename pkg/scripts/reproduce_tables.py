"""Print the dihedral height tables and the tetrahedral roots with derived edge lengths."""
import argparse
import math
from dataclasses import dataclass

from vortexsym import catalog


@dataclass
class TablesConfig:
    n_min: int = 2
    n_max: int = 5


def main(cfg: TablesConfig) -> None:
    for with_poles in (False, True):
        print(f"dihedral schemes {'with' if with_poles else 'without'} poles")
        print(f"{'n':>3} {'lambda_a':>14} {'z_a':>14} {'lambda_p':>14} {'z_p':>14}")
        for n in range(cfg.n_min, cfg.n_max + 1):
            r = catalog.dihedral_roots(n, with_poles)
            cells = [r.lambda_anti, r.z_anti, r.lambda_prism, r.z_prism]
            print(f"{n:>3} " + " ".join(f"{x:>14.10f}" if x is not None else f"{'-':>14}" for x in cells))
        print()
    for with_cube in (False, True):
        a = math.sqrt(catalog.tetrahedral_root(with_cube))
        hexagon = 2 * math.sqrt(2) * a
        triangle = math.sqrt(2) * (-a + math.sqrt(1 - 2 * a * a))
        tag = "with cube" if with_cube else "no fixed points"
        print(f"tetrahedral, {tag}: alpha = {a:.8f}, hexagon edge = {hexagon:.6f}, triangle edge = {triangle:.6f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-max", type=int, default=5)
    args = p.parse_args()
    main(TablesConfig(n_max=args.n_max))
