import os
from pathlib import Path
from dotenv import load_dotenv

# Project paths
BASE_DIR = Path(__file__).resolve().parent.parent.parent

# Load environment variables from .env file
load_dotenv(BASE_DIR / '.env')

# Normalization limits
DNF_CAP = int(os.getenv("FOPZ_DNF_CAP", "4096"))

# Enumeration limits (meet-in-the-middle tables, sumsets, pair tables)
SUM_CAP = int(os.getenv("FOPZ_SUM_CAP", str(10 ** 8)))

# Reduction limits
IE_SUBSET_CAP = int(os.getenv("FOPZ_IE_CAP", "4096"))
FAMILY_CAP = int(os.getenv("FOPZ_FAMILY_CAP", str(2 * 10 ** 6)))

# Range index backend selection
SCAN_THRESHOLD = int(os.getenv("FOPZ_SCAN_THRESHOLD", "64"))

# Runtime
THREADS = int(os.getenv("FOPZ_THREADS", "1"))

# Logging
LOG_LEVEL = os.getenv("FOPZ_LOG_LEVEL", "INFO").upper()
LOG_FILE = os.getenv("FOPZ_LOG_FILE", "")

# Engines understood by the dispatcher
ENGINES = ["brute", "baseline", "reduction", "ineqdim3", "auto"]
DEFAULT_ENGINE = "auto"
