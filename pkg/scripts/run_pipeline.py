"""
Local Pipeline Script

Runs simulate -> fit -> recommend -> compare into one output directory and
prints what each step wrote.

    python scripts/run_pipeline.py [output_dir] [budget]
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.main import main  # noqa: E402

OUTPUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
BUDGET = sys.argv[2] if len(sys.argv) > 2 else "50"


def banner(title: str):
    print("\n" + "=" * 50)
    print(title)
    print("=" * 50)


def step_simulate() -> bool:
    banner("Simulating campaigns")
    code = main(["simulate", "--output", str(OUTPUT), "--seed", "7"])
    lines = (OUTPUT / "observations.csv").read_text().splitlines()
    print(f"Exit: {code}, rows: {len(lines) - 1}")
    return code == 0


def step_fit() -> bool:
    banner("Fitting sigmoids")
    code = main(["fit", "--input", str(OUTPUT / "observations.csv"), "--output", str(OUTPUT)])
    for entry in json.loads((OUTPUT / "fits.json").read_text())["fits"]:
        params = entry["params"]
        print(f"{entry['campaign_id']}: s={params['s']:.1f} t={params['t']:.3f} p={params['p']:.3f} "
              f"converged={entry['converged']}")
    return code == 0


def step_recommend() -> bool:
    banner(f"Recommending bids (budget ${BUDGET})")
    code = main([
        "recommend", "--input", str(OUTPUT / "observations.csv"), "--output", str(OUTPUT), "--budget", BUDGET,
    ])
    for rec in json.loads((OUTPUT / "recommendations.json").read_text())["recommendations"]:
        print(f"{rec['campaign_id']}: bid=${rec['bid_star_ecpm']} cost=${rec['ecpm_cost_star']} "
              f"clicks={rec['predicted_clicks']} binding={rec['budget_binding']}")
    return code == 0


def step_compare() -> bool:
    banner("Comparing models")
    code = main(["compare", "--input", str(OUTPUT / "observations.csv"), "--output", str(OUTPUT)])
    print((OUTPUT / "models.csv").read_text())
    print((OUTPUT / "strategies.csv").read_text())
    print((OUTPUT / "spenders.csv").read_text())
    return code == 0


def run_all():
    print("\n" + "#" * 60)
    print("# BID CURVE PIPELINE")
    print("#" * 60)

    results = {
        "Simulate": step_simulate(),
        "Fit": step_fit(),
        "Recommend": step_recommend(),
        "Compare": step_compare(),
    }

    banner("RESULTS")
    for name, passed in results.items():
        print(f"{name}: {'✅ OK' if passed else '❌ FAILED'}")
    return all(results.values())


if __name__ == "__main__":
    sys.exit(0 if run_all() else 1)
