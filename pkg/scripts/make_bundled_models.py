"""Regenerate the model files shipped in src/qtense/data/."""
from pathlib import Path

from qtense.model import generate_commuting_model, generate_dephasing_model, rabi_model, save_model

DATA = Path(__file__).resolve().parents[1] / "src" / "qtense" / "data"

MODELS = {
    "rabi.model": rabi_model(),
    "commuting_d8.model": generate_commuting_model(8, 3, seed=8),
    "dephasing_3q.model": generate_dephasing_model(3, 1.0, [0.05, 0.03, 0.02], seed=0),
}

if __name__ == "__main__":
    for name, m in MODELS.items():
        (DATA / name).write_text(save_model(m), encoding="utf-8")
        print("wrote", DATA / name)
