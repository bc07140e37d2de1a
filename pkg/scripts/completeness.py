"""Dense critical-point search on every scheme, compared with the catalogue."""
import argparse
import time
from dataclasses import dataclass

from vortexsym import catalog
from vortexsym.reduction import STANDARD_SCHEMES, make_scheme


@dataclass
class SearchConfig:
    rows: int = 200
    cols: int = 200


def main(cfg: SearchConfig) -> None:
    for spec in STANDARD_SCHEMES:
        s = make_scheme(*spec)
        start = time.perf_counter()
        res = catalog.critical_point_search(s, (cfg.rows, cfg.cols))
        print(f"{s.label:<12} {res.candidates:>5} candidates, {len(res.critical_points):>4} critical points, "
              f"max distance to catalogue {res.max_distance:.1e}, {time.perf_counter() - start:.2f} s")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--grid", type=int, default=200)
    g = p.parse_args().grid
    main(SearchConfig(g, g))
