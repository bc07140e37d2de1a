"""Energy families of periodic orbits around minima and collision points, with their lifts."""
import argparse
from dataclasses import dataclass

from vortexsym import verify


@dataclass
class FamilyRunConfig:
    only_stable: bool = False


def main(cfg: FamilyRunConfig) -> None:
    print(f"{'scheme':<12} {'centre':<32} {'energies':<36} {'periods':<36} closure  |dH|")
    for spec, rec in verify.family_centres():
        if cfg.only_stable and rec.kind != "min":
            continue
        fs = verify.family_summary(spec, rec)
        energies = " ".join(f"{e:.4g}" for e in fs.energies)
        periods = " ".join(f"{t:.4g}" for t in fs.periods)
        print(f"{fs.scheme:<12} {fs.centre:<32} {energies:<36} {periods:<36} {fs.closure:.1e}  {fs.energy_drift:.1e}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--only-stable", action="store_true")
    main(FamilyRunConfig(p.parse_args().only_stable))
