#!/usr/bin/env python3
"""Regenerate the bundled example datasets in data/.

The files are committed so that documentation and tests have stable inputs;
rerunning this script reproduces them bit-for-bit (fixed seeds).

  misreported_ar1_strong.csv  latent AR(1) alpha=0.5, mu_eps=5, q=0.3,
                              omega=0.5, n=1000. Strong mean separation:
                              the fit pipeline recovers q within 0.3+-0.05.
  ar1_plain.csv               latent AR(1) alpha=0.5, mu_eps=1, no
                              misreporting, n=2000. The log-ACF diagnostic
                              does not reject on it.
  misreported_ar1_mild.csv    same AR(1) with q=0.3, omega=0.5, n=2000.
                              Mild separation keeps the ACF informative and
                              the log-ACF diagnostic rejects on it.
"""
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from misreport import ArmaParams, MisreportModel, simulate, simulate_observed  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "data"


def write_series(path: Path, values) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "y"])
        for t, v in enumerate(values):
            writer.writerow([t, repr(float(v))])


def main() -> None:
    OUT.mkdir(exist_ok=True)

    strong = MisreportModel(
        arma=ArmaParams(alpha=(0.5,), mu_eps=5.0, sigma2_eps=1.0), q=0.3, omega=0.5
    )
    write_series(OUT / "misreported_ar1_strong.csv",
                 simulate_observed(strong, 1000, seed=20260810).y.values)

    plain = ArmaParams(alpha=(0.5,), mu_eps=1.0, sigma2_eps=1.0)
    write_series(OUT / "ar1_plain.csv", simulate(plain, 2000, seed=1).values)

    mild = MisreportModel(arma=plain, q=0.3, omega=0.5)
    write_series(OUT / "misreported_ar1_mild.csv",
                 simulate_observed(mild, 2000, seed=9).y.values)
    print(f"wrote 3 files to {OUT}")


if __name__ == "__main__":
    main()
