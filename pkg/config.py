"""
Configuration settings for the threshold cointegration toolkit.
"""
from pathlib import Path

# Base directory for datasets uploaded through the dashboard
DATA_DIR = Path(".data")

# File names inside a stored dataset
PANEL_FILE = "panel.csv"
MANIFEST_FILE = "manifest.json"

# Bundled synthetic DGP specs
BUNDLED_DIR = Path(__file__).resolve().parent / "samples"

# CSV layout
DATE_COLUMN = "date"
DEFAULT_START = "1985-01"

# Significance levels reported by every test, most stringent first
LEVELS = ("1%", "5%", "10%")
LEVEL_VALUES = {"1%": 0.01, "5%": 0.05, "10%": 0.10}

# Unit-root battery
DFGLS_CBAR = {"c": -7.0, "ct": -13.5}
DEFAULT_CRITERION = "bic"
STATIONARITY_LEVEL = "5%"

# Threshold VECM grid search
DEFAULT_GRID_POINTS = 300
DEFAULT_TRIM = 0.05
DEFAULT_BETA_RADIUS = 6.0
TIE_TOLERANCE = 1e-12

# Sup-LM bootstrap
DEFAULT_REPLICATIONS = 5000
DEFAULT_SCHEME = "parametric"
SCHEMES = ("parametric", "residual")

# Pipeline
DEFAULT_GATE = 0.10

# Desk-scale profile (--fast)
FAST_GRID_POINTS = 50
FAST_REPLICATIONS = 200

# Simulator
DEFAULT_BURN_IN = 200
MIN_SIM_LENGTH = 20

# App metadata
APP_NAME = "Threshold Cointegration Analysis"
