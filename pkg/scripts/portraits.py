"""Render reduced phase portraits for the schemes with an observed symmetry enlargement."""
import argparse
import json
from dataclasses import dataclass, field
from pathlib import Path

from vortexsym import catalog, orbits, svg
from vortexsym.reduction import make_scheme


@dataclass
class PortraitRunConfig:
    schemes: list = field(default_factory=lambda: [
        ("Dn", 2, "none"), ("Dn", 3, "none"), ("Dn", 4, "none"),
        ("Dn", 2, "poles"), ("T", None, "none"), ("T", None, "cube"),
    ])
    grid: tuple = (12, 12)
    t_span: float = 200.0
    out: Path = Path("portraits")
    jobs: int = 1


def main(cfg: PortraitRunConfig) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    for spec in cfg.schemes:
        s = make_scheme(*spec)
        pspec = orbits.PortraitSpec(s, grid=cfg.grid, t_span=cfg.t_span)
        trajs = orbits.sample_portrait(pspec, jobs=cfg.jobs)
        markers = [(r.point, orbits.color_for(r)) for r in catalog.catalog_for(s)]
        stem = s.label.strip("()").replace(",", "_")
        (cfg.out / f"{stem}.svg").write_text(svg.render([(t.points, t.color) for t in trajs], markers,
                                                        title=f"{s.label} reduced phase portrait"))
        (cfg.out / f"{stem}.json").write_text(json.dumps(orbits.portrait_manifest(pspec, trajs), indent=2))
        closed = sum(t.closed for t in trajs)
        print(f"{s.label}: {len(trajs)} trajectories, {closed} closed -> {cfg.out / stem}.svg")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--grid", type=int, default=12)
    p.add_argument("--tspan", type=float, default=200.0)
    p.add_argument("--out", type=Path, default=Path("portraits"))
    p.add_argument("--jobs", type=int, default=1)
    a = p.parse_args()
    main(PortraitRunConfig(grid=(a.grid, a.grid), t_span=a.tspan, out=a.out, jobs=a.jobs))
