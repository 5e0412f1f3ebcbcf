"""
Bundled synthetic datasets. Each one is a DGP spec simulated on demand.
"""
from typing import Dict, List, Optional

from config import BUNDLED_DIR
from data_loader import Panel
from errors import DataError
from simulator import DgpSpec, simulate_tvecm


def _spec_path(name: str):
    return BUNDLED_DIR / f"{name.replace('-', '_')}.json"


def list_bundled() -> List[Dict]:
    """Name, description and size of every bundled dataset."""
    datasets = []
    for path in sorted(BUNDLED_DIR.glob("*.json")):
        spec = DgpSpec.from_json(path)
        datasets.append({
            "name": path.stem.replace("_", "-"),
            "description": spec.description,
            "labels": list(spec.labels),
            "n_obs": spec.n_obs,
            "start": spec.start,
            "lags": spec.lags,
        })
    return datasets


def bundled_spec(name: str) -> DgpSpec:
    path = _spec_path(name)
    if not path.exists():
        names = ", ".join(d["name"] for d in list_bundled())
        raise DataError(f"unknown bundled dataset '{name}' (available: {names})")
    return DgpSpec.from_json(path)


def load_bundled(name: str, seed: Optional[int] = None) -> Panel:
    """Simulate a bundled dataset; `seed` overrides the spec's own seed."""
    spec = bundled_spec(name).with_overrides(seed=seed)
    return simulate_tvecm(spec)
