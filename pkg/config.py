import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

BASE_DIR = Path(__file__).resolve().parent
EXPERIMENTS_DIR = BASE_DIR / "experiments"

OUT_DIR = os.getenv("SILO_OUT_DIR", "results")
LOG_LEVEL = os.getenv("SILO_LOG_LEVEL", "INFO").upper()
MAX_WORKERS = int(os.getenv("SILO_MAX_WORKERS", "2"))

# Projected conjugate gradient for the semidefinite Neumann systems
CG_TOLERANCE = float(os.getenv("SILO_CG_TOL", "1e-10"))
CG_MAXITER_FACTOR = int(os.getenv("SILO_CG_MAXITER_FACTOR", "10"))
CG_RESTARTS = int(os.getenv("SILO_CG_RESTARTS", "3"))

# Alarm thresholds checked by the harness after every finite-difference run
CLIP_ALARM = float(os.getenv("SILO_CLIP_ALARM", "1e-8"))
MASS_ALARM = float(os.getenv("SILO_MASS_ALARM", "10.0"))

SNAPSHOT_EVERY = int(os.getenv("SILO_SNAPSHOT_EVERY", "0"))
