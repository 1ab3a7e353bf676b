import os
from dotenv import load_dotenv

load_dotenv()

SETTINGS = {
    "coin_trunc": int(os.getenv("FOCKREC_TRUNC", "8")),
    "tolerance": float(os.getenv("FOCKREC_TOLERANCE", "1e-12")),
    "skip_convention": os.getenv("FOCKREC_SKIP_CONVENTION", "occupied"),
    "symmetrise_cap": int(os.getenv("FOCKREC_SYM_CAP", "8")),
    "coherent_cap": int(os.getenv("FOCKREC_COHERENT_CAP", "12")),
    "log_dir": os.getenv("FOCKREC_LOG_DIR", "logs"),
    "log_level": os.getenv("FOCKREC_LOG_LEVEL", "INFO"),
}
